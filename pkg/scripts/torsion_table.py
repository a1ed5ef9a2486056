"""Tabulate the torsion gcd and characteristic-map surjectivity across root data."""

import argparse

from demazure.dualalgebra import DualAlgebra
from demazure.demazurealgebra import DemazureAlgebra
from demazure.errors import DemazureError
from demazure.formalgroupalgebra import AlgebraConfig

TYPES = ["A1", "A2", "A3", "B2", "C2", "B3", "C3", "G2"]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--types", default=",".join(TYPES))
    parser.add_argument("--fgl", default="additive")
    parser.add_argument("--lattices", default="sc,adj")
    args = parser.parse_args()
    print(f"{'type':5} {'lattice':7} {'gcd':>4} {'expected primes':16} charmap")
    for t in args.types.split(","):
        for lat in args.lattices.split(","):
            cfg = AlgebraConfig(type=t, lattice=lat, fgl=args.fgl, prec=2)
            try:
                X = DualAlgebra(DemazureAlgebra(cfg))
                tor = X.torsion_gcd()
                cm = X.charmap_surjectivity()
            except DemazureError as exc:
                print(f"{t:5} {lat:7} {'-':>4} {'':16} {exc.reason}")
                continue
            status = "surjective" if cm["surjective"] else f"obstruction {cm['obstruction']}"
            primes = ",".join(map(str, tor["torsion_primes_expected"])) or "-"
            print(f"{t:5} {lat:7} {tor['gcd']:>4} {primes:16} {status}")


if __name__ == "__main__":
    main()
