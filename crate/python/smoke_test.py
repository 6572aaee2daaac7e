"""Smoke test for the kn_syntomic extension.

Build it first:
    cargo build --release -p syntomic-py --features extension-module
then run this script from the repository root. It finds the shared library
under target/release and imports it under its module name.
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for name in ("libkn_syntomic.so", "libkn_syntomic.dylib", "kn_syntomic.dll"):
        path = ROOT / "target" / "release" / name
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("kn_syntomic", str(path))
            spec = importlib.util.spec_from_loader("kn_syntomic", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("kn_syntomic not built; see the module docstring")


def main():
    kn = load()

    doc = json.loads(kn.compute("tc", 2, 2))
    assert len(doc["entries"]) == 32, len(doc["entries"])
    assert doc["ideal"] == "(2,v1,v2,v3)"

    closed = json.loads(kn.compute("tc", 2, 2, field="closed"))
    tags = [e["coeff"] for e in closed["entries"]]
    assert tags.count("Fp") == 8 and tags.count("k") == 16, tags

    assert len(json.loads(kn.compute("tc", 3, 1))["entries"]) == 20

    svg = kn.render(kn.compute("tc", 3, 1), "svg")
    assert svg.count("<circle") == 20

    try:
        kn.compute("k1-k", 2, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("k(1) at p=2 should be rejected")

    failed = [r for r in kn.verify("all", str(ROOT / "figures")) if not r[1]]
    assert not failed, failed
    print("kn_syntomic smoke test passed")


if __name__ == "__main__":
    main()
