import os
import shutil
import subprocess
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
PROGRAMS = FIXTURES / "programs"


def find_rustc() -> str | None:
    return shutil.which("rustc") or next((p for p in ["/opt/cargo/bin/rustc"] if os.path.exists(p)), None)


RUSTC = find_rustc()
needs_rustc = pytest.mark.skipif(RUSTC is None, reason="no Rust toolchain")


def compile_and_run(src: str, workdir: Path, name: str = "prog") -> subprocess.CompletedProcess:
    """Compile ``src`` with rustc; returns the compile result, or the run result on success."""
    rs = workdir / f"{name}.rs"
    exe = workdir / name
    rs.write_text(src)
    built = subprocess.run([RUSTC, "--edition", "2021", "-A", "warnings", "-o", str(exe), str(rs)], capture_output=True, text=True, timeout=120)
    if built.returncode != 0:
        return built
    return subprocess.run([str(exe)], capture_output=True, text=True, timeout=30)
