#!/usr/bin/env python3
"""Regenerate the bundled benchmark datasets from their original CRAN sources.

The library ships five classic robustness benchmarks as CSV assets:

    telephone  <- robustbase::telef        (24 x 2)
    stars      <- robustbase::starsCYG     (47 x 2)
    animals    <- robustbase::Animals2     (65 x 2, species names as row ids)
    topgear    <- robustHD::TopGear        (297 x 32, mixed types)
    glass      <- cellWise::data_glass     (180 x 750)

This script downloads the source packages from a CRAN mirror, converts the
R data files to CSV and rewrites the manifest (dimensions + sha256).  It is
the provenance record for the bundled assets; rerun it if redistribution
concerns ever require stripping them from the wheel.

Script-only dependencies (not needed by the library): rdata, pandas.

Usage:
    python scripts/fetch_datasets.py [--mirror URL] [--out DIR]
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import tarfile
import urllib.request
from pathlib import Path

import numpy as np
import pandas as pd
import rdata

SOURCES = {
    "robustbase": "robustbase_0.99-7.tar.gz",
    "robustHD": "robustHD_0.8.4.tar.gz",
    "cellWise": "cellWise_2.5.7.tar.gz",
}

DESCRIPTIONS = {
    "telephone": "Number of international phone calls from Belgium, 1950-1973 "
                 "(years coded 50-73); the 1964-1969 stretch was recorded in the "
                 "wrong unit. Source: robustbase::telef.",
    "stars": "Hertzsprung-Russell diagram of the star cluster CYG OB1: "
             "log effective temperature vs log light intensity of 47 stars. "
             "Source: robustbase::starsCYG.",
    "animals": "Body weight (kg) and brain weight (g) of 65 land animal species, "
               "including three dinosaurs. Source: robustbase::Animals2.",
    "topgear": "297 cars featured on the BBC show Top Gear up to 2014, with 32 "
               "mixed-type variables (price, engine, dimensions, equipment). "
               "Source: robustHD::TopGear.",
    "glass": "EPXMA spectra of 180 archaeological glass vessels observed at 750 "
             "wavelengths. Source: cellWise::data_glass.",
}


def fetch(mirror: str, filename: str, cache: Path) -> Path:
    dest = cache / filename
    if not dest.exists():
        url = f"{mirror.rstrip('/')}/src/contrib/{filename}"
        print(f"downloading {url}")
        with urllib.request.urlopen(url) as resp:
            dest.write_bytes(resp.read())
    return dest


def rda_from_tar(tarball: Path, member: str):
    with tarfile.open(tarball) as tf:
        payload = tf.extractfile(member).read()
    return rdata.read_rda(io.BytesIO(payload))


def tab_from_tar(tarball: Path, member: str) -> pd.DataFrame:
    with tarfile.open(tarball) as tf:
        payload = tf.extractfile(member).read()
    return pd.read_csv(io.BytesIO(payload), sep=r"\s+")


def write_csv(df: pd.DataFrame, path: Path) -> None:
    df.to_csv(path, index=False, na_rep="NA")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mirror", default="https://cran.r-project.org")
    parser.add_argument("--out", default=None, help="asset directory (default: package data dir)")
    parser.add_argument("--cache", default="/tmp/robkit-fetch")
    args = parser.parse_args()

    out = Path(args.out) if args.out else Path(__file__).resolve().parents[1] / "src" / "robkit" / "datasets" / "data"
    out.mkdir(parents=True, exist_ok=True)
    cache = Path(args.cache)
    cache.mkdir(parents=True, exist_ok=True)

    tarballs = {pkg: fetch(args.mirror, fn, cache) for pkg, fn in SOURCES.items()}

    # telephone: Year / Calls
    telef = rda_from_tar(tarballs["robustbase"], "robustbase/data/telef.rda")["telef"]
    telef = telef.reset_index(drop=True)
    write_csv(telef, out / "telephone.csv")

    # stars: log.Te / log.light
    stars = rda_from_tar(tarballs["robustbase"], "robustbase/data/starsCYG.rda")["starsCYG"]
    stars = stars.reset_index(drop=True)
    write_csv(stars, out / "stars.csv")

    # animals: species names become an explicit label column
    animals = tab_from_tar(tarballs["robustbase"], "robustbase/data/Animals2.tab")
    animals = animals.rename_axis("animal").reset_index()
    write_csv(animals, out / "animals.csv")

    # topgear: keep original column names and row order (0-based positions
    # are how individual cars are referenced downstream)
    topgear = rda_from_tar(tarballs["robustHD"], "robustHD/data/TopGear.RData")["TopGear"]
    topgear = topgear.reset_index(drop=True)
    for col in topgear.columns:
        if topgear[col].dtype.name == "category":
            topgear[col] = topgear[col].astype(str).replace("nan", np.nan)
    write_csv(topgear, out / "topgear.csv")

    # glass: 750 spectral channels
    glass = rda_from_tar(tarballs["cellWise"], "cellWise/data/data_glass.rdata")["data_glass"]
    glass = glass.reset_index(drop=True)
    write_csv(glass, out / "glass.csv")

    manifest = {}
    dims = {"telephone": (24, 2), "stars": (47, 2), "animals": (65, 2),
            "topgear": (297, 32), "glass": (180, 750)}
    files = {"telephone": "telephone.csv", "stars": "stars.csv", "animals": "animals.csv",
             "topgear": "topgear.csv", "glass": "glass.csv"}
    for name, fn in files.items():
        digest = hashlib.sha256((out / fn).read_bytes()).hexdigest()
        n, p = dims[name]
        manifest[name] = {
            "file": fn,
            "n_rows": n,
            "n_features": p,
            "sha256": digest,
            "description": DESCRIPTIONS[name],
        }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote assets + manifest to {out}")


if __name__ == "__main__":
    main()
