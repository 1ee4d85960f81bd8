"""Regenerate src/cohalab/data/mc_catalog.json, freezing the computed groupoid data."""
import json
from pathlib import Path

from cohalab.mcgroupoid import (
    DgLie3, fibration_count, groupoid_card, parse_catalog, quasi_iso_compare, validate,
)

P = 5
ENTRIES = [
    dict(id="abelian-zero-d", dims=[1, 1, 0], abelian=True,
         description="abelian, all differentials zero"),
    dict(id="abelian-d0-iso", dims=[1, 1, 0], d0=[[1]], abelian=True,
         description="abelian, d0 an isomorphism; acyclic"),
    dict(id="zero", dims=[0, 0, 0], abelian=True, description="the zero algebra"),
    dict(id="abelian-h1", dims=[1, 2, 1], d0=[[0], [0]], d1=[[0, 1]], abelian=True,
         description="abelian with H0 and H1 one-dimensional"),
    dict(id="abelian-acyclic-summand", dims=[2, 2, 0], d0=[[0, 0], [0, 1]], abelian=True,
         description="abelian-zero-d plus an acyclic summand F -> F"),
    dict(id="ad-action", dims=[1, 2, 0], brackets={"01": [[0, 0, 1, 1]]},
         description="[y,a] = b, zero differentials"),
    dict(id="nonabelian-acyclic", dims=[1, 2, 1], d0=[[3], [0]], d1=[[0, 1]],
         brackets={"01": [[0, 0, 1, 1]], "11": [[0, 0, 0, 2]]},
         description="dy = 3a, db = c, [y,a] = b, [a,a] = 2c; acyclic"),
    dict(id="quadratic-mc", dims=[0, 1, 1], brackets={"11": [[0, 0, 0, 2]]},
         description="[x,x] = 2f, so the MC equation reads x^2 = 0"),
    dict(id="split-extension", dims=[0, 2, 1], d1=[[0, 1]],
         brackets={"11": [[0, 1, 0, 1], [1, 1, 0, 2]]}, h_dims=[0, 1, 0],
         description="h = <a>, ideal n = <b, c>; db = c, [a,b] = c, [b,b] = 2c"),
    dict(id="split-extension-2", dims=[0, 2, 1], d1=[[0, 2]],
         brackets={"11": [[0, 1, 0, 2], [1, 1, 0, 2]]}, h_dims=[0, 1, 0],
         description="h = <a>, ideal n = <b, c>; db = 2c, [a,b] = 2c, [b,b] = 2c"),
]
PAIRS = [
    dict(lhs="abelian-d0-iso", rhs="zero", phi=[[], [], []]),
    dict(lhs="zero", rhs="abelian-d0-iso", phi=[[[]], [[]], []]),
    dict(lhs="nonabelian-acyclic", rhs="zero", phi=[[], [], []]),
    dict(lhs="abelian-zero-d", rhs="abelian-acyclic-summand", phi=[[[1], [0]], [[1], [0]], []]),
    dict(lhs="ad-action", rhs="ad-action", phi=[[[1]], [[1, 0], [0, 1]], []]),
    dict(lhs="abelian-h1", rhs="abelian-h1", phi=[[[1]], [[1, 0], [0, 1]], [[1]]]),
]
KEYS = ["id", "description", "p", "dims", "d0", "d1", "brackets", "abelian", "h_dims", "expected"]


def main():
    out = []
    for e in ENTRIES:
        e = dict(e, p=P)
        g = DgLie3.from_sparse(P, tuple(e["dims"]), e.get("d0"), e.get("d1"), e.get("brackets"))
        assert validate(g).ok, e["id"]
        e["expected"] = groupoid_card(g).to_json()
        if "h_dims" in e:
            assert fibration_count(g, e["h_dims"]).passed, e["id"]
        out.append({k: e[k] for k in KEYS if k in e})
    catalog = {"p": P, "entries": out, "pairs": PAIRS}
    parsed = parse_catalog(catalog)
    for pr in parsed.pairs:
        assert quasi_iso_compare(parsed[pr.lhs].algebra, parsed[pr.rhs].algebra, pr.phi).passed
    path = Path(__file__).resolve().parents[1] / "src" / "cohalab" / "data" / "mc_catalog.json"
    path.write_text(json.dumps(catalog, indent=1) + "\n")
    print(f"wrote {len(out)} entries, {len(PAIRS)} pairs to {path}")


if __name__ == "__main__":
    main()
