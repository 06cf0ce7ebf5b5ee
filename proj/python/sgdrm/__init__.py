# Copyright 2026 The sgdrm Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Python bindings for the sgdrm library."""

import json as _json
import os as _os

from ._sgdrm import *  # noqa: F401,F403
from ._sgdrm import _emit_json, _profile_json, _run_json

__version__ = "0.1.0"


def profile(name):
    """Return a named profile as a config dict."""
    return _json.loads(_profile_json(name))


def run(config):
    """Run the scenario pipeline; one result dict per sweep point."""
    return _run_json(_json.dumps(config))


def run_to(config, out_dir):
    """Run and write the CSV/SVG/JSON outputs. Returns (exit_code, paths)."""
    code, paths = _emit_json(_json.dumps(config), _os.fspath(out_dir))
    return code, [str(p) for p in paths]
