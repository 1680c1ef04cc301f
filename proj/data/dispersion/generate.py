"""Regenerate the bundled dispersion tables from the refractiveindex.info
database as packaged by the `refidx` PyPI distribution (pip install refidx).

Each material is sampled on a uniform 5 nm grid over 270-3200 nm. Where a
single dataset does not cover that window, two datasets are spliced at a
fixed cut wavelength (the lower source is used strictly below the cut).
TiO2 uses the rutile ordinary-ray Sellmeier fit above 400 nm and a
thin-film dataset below, where the fit approaches its UV pole.
Extinction is written with the k >= 0 sign convention.
"""
import numpy as np
import refidx

GRID_NM = np.arange(270.0, 3200.0 + 1e-9, 5.0)

# material -> list of (source, cut_nm); a source is used up to its cut.
SOURCES = {
    "Mo": [("Kirillova", None)],
    "Nb": [("Weaver", 400.0), ("Golovashkin-293K", None)],
    "Ta": [("Werner-DFT", 667.0), ("Ordal", None)],
    "W": [("Weaver", None)],
    "TiO2": [("Siefke", 400.0), ("Devore-o", None)],
    "MgF2": [("Dodge-o", None)],
}


def devore_rutile_ordinary(lam_nm):
    # Sellmeier fit of rutile (ordinary ray) from Devore (1951); evaluated
    # directly so it extends past the 1530 nm end of the tabulated entry.
    x = (lam_nm / 1000.0) ** 2
    return complex(np.sqrt(5.913 + 0.2441 / (x - 0.0803)), 0.0)


FORMULAS = {("TiO2", "Devore-o"): devore_rutile_ordinary}


def sample(book, pieces):
    db = refidx.DataBase().materials["main"][book]
    rows = []
    for lam in GRID_NM:
        for src, cut in pieces:
            if cut is None or lam < cut:
                formula = FORMULAS.get((book, src))
                if formula is not None:
                    idx = formula(lam)
                else:
                    idx = complex(db[src].get_index(lam / 1000.0))
                rows.append((lam, idx.real, abs(idx.imag)))
                break
    return rows


def main():
    for book, pieces in SOURCES.items():
        with open(f"{book}.csv", "w", encoding="utf-8", newline="\n") as out:
            out.write("wavelength_nm,n,k\n")
            for lam, n, k in sample(book, pieces):
                out.write(f"{lam:.1f},{n:.6f},{k:.6f}\n")


if __name__ == "__main__":
    main()
