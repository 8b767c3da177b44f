# Copyright 2026 The demotraj Authors
#
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

import os
import pathlib
import shutil
import subprocess

import pytest

DATA_DIR = pathlib.Path(
    os.environ.get(
        "DEMOTRAJ_TEST_DATA_DIR", pathlib.Path(__file__).resolve().parents[1] / "data"
    )
)


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("DEMOTRAJ_CLI") or shutil.which("demotraj")
    if not path:
        pytest.skip("demotraj command-line tool not available")
    return path


@pytest.fixture(scope="session")
def recording(tmp_path_factory):
    """Noiseless simulated recording written by the command-line tool."""
    path = os.environ.get("DEMOTRAJ_CLI") or shutil.which("demotraj")
    if not path:
        pytest.skip("demotraj command-line tool not available")
    out = tmp_path_factory.mktemp("recording")
    subprocess.run(
        [path, "generate", "--spec", str(DATA_DIR / "sim_spec.json"), "--out", str(out),
         "--seed", "3"],
        check=True, capture_output=True)
    subprocess.run(
        [path, "process", "--config", str(DATA_DIR / "pipeline.json"),
         "--poses", str(out / "poses.csv"), "--camera", str(out / "camera.csv"),
         "--out", str(out / "episode_0.hdf5")],
        check=True, capture_output=True)
    return out
