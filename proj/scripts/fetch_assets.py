#!/usr/bin/env python3
"""Download the clean test images and store them as 8-bit grayscale PGM files.

Images keep their native size (House 256x256, the others 512x512) unless
--size asks for a square resample.

Images come from the USC-SIPI database. When SIPI cannot be reached, mirrors
on the Python package index are tried for the images that have one. Every
written file is checked against the pinned SHA-256 when one is known;
otherwise its digest is recorded in manifest.json next to the images.

Usage: fetch_assets.py [--dest DIR] [--only NAME ...] [--size N] [--force]
The default destination is $MFBM3D_ASSET_DIR or ~/.cache/mfbm3d/assets.
"""

import argparse
import hashlib
import io
import json
import os
import sys
import tarfile
import urllib.request

from PIL import Image

SIPI = "https://sipi.usc.edu/database/download.php?vol=misc&img={}"

# name -> (SIPI id, [(mirror sdist on PyPI, member path)])
SOURCES = {
    "house": ("4.1.05", []),
    "lena": ("4.2.04", [("bm3d", "examples/image_Lena512rgb.png")]),
    "peppers": ("4.2.07", []),
    "bridge": ("5.2.10", []),
}

# SHA-256 of the converted PGM files. Only digests that were actually
# observed are pinned.
PINNED = {
    "lena:pypi-bm3d": "3c011a8e33645ec9bf30d84b938a0ea56a53739e2fddf18e61df16842006bde1",
}

TIMEOUT = 60


def default_dest():
    env = os.environ.get("MFBM3D_ASSET_DIR")
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "mfbm3d", "assets")


def to_gray(data, size=None):
    img = Image.open(io.BytesIO(data))
    img.load()
    if img.mode not in ("L", "I;16", "I"):
        img = img.convert("RGB").convert("L")  # ITU-R 601-2 luma
    elif img.mode != "L":
        img = img.convert("L")
    if size and img.size != (size, size):
        img = img.resize((size, size), Image.BOX)
    return img


def pgm_bytes(img):
    buf = io.BytesIO()
    buf.write(f"P5\n{img.width} {img.height}\n255\n".encode())
    buf.write(img.tobytes())
    return buf.getvalue()


def from_sipi(image_id):
    with urllib.request.urlopen(SIPI.format(image_id), timeout=TIMEOUT) as r:
        return r.read()


def from_pypi(package, member):
    with urllib.request.urlopen(f"https://pypi.org/pypi/{package}/json", timeout=TIMEOUT) as r:
        meta = json.load(r)
    sdists = [u for u in meta["urls"] if u["filename"].endswith(".tar.gz")]
    if not sdists:
        raise RuntimeError(f"no source distribution for {package}")
    with urllib.request.urlopen(sdists[0]["url"], timeout=600) as r:
        blob = r.read()
    with tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz") as tar:
        for m in tar.getmembers():
            if m.name.endswith(member):
                return tar.extractfile(m).read()
    raise RuntimeError(f"{member} not found in {package}")


def fetch_one(name, dest, force, manifest, size=None):
    out = os.path.join(dest, name + ".pgm")
    if os.path.exists(out) and not force:
        print(f"{name}: present ({out})")
        return True
    sipi_id, mirrors = SOURCES[name]
    attempts = [(f"sipi-{sipi_id}", lambda: from_sipi(sipi_id))]
    attempts += [(f"pypi-{pkg}", lambda pkg=pkg, mem=mem: from_pypi(pkg, mem)) for pkg, mem in mirrors]
    for source, fetch in attempts:
        try:
            payload = pgm_bytes(to_gray(fetch(), size))
        except Exception as exc:  # network and decode failures alike
            print(f"{name}: {source} failed: {exc}", file=sys.stderr)
            continue
        digest = hashlib.sha256(payload).hexdigest()
        pinned = None if size else PINNED.get(f"{name}:{source}")
        if pinned and pinned != digest:
            print(f"{name}: checksum mismatch from {source} ({digest})", file=sys.stderr)
            continue
        with open(out, "wb") as f:
            f.write(payload)
        manifest[name] = {"source": source, "sha256": digest}
        print(f"{name}: {source} -> {out} sha256={digest}")
        return True
    print(f"{name}: no source reachable", file=sys.stderr)
    return False


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dest", default=default_dest())
    ap.add_argument("--only", nargs="*", choices=sorted(SOURCES))
    ap.add_argument("--size", type=int, help="resample to SIZE x SIZE (default: native size)")
    ap.add_argument("--force", action="store_true")
    args = ap.parse_args()
    os.makedirs(args.dest, exist_ok=True)
    manifest_path = os.path.join(args.dest, "manifest.json")
    manifest = {}
    if os.path.exists(manifest_path):
        with open(manifest_path) as f:
            manifest = json.load(f)
    ok = True
    for name in args.only or sorted(SOURCES):
        ok &= fetch_one(name, args.dest, args.force, manifest, args.size)
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
