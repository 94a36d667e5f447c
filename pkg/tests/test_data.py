from pathlib import Path

from k3mds.classify import KondoList
from k3mds.discriminant import genus_equal

ROOT = Path(__file__).resolve().parents[1]


def test_shipped_files_identical():
    a = (ROOT / "data" / "kondo-r9plus").read_bytes()
    b = (ROOT / "src" / "k3mds" / "data" / "kondo-r9plus").read_bytes()
    assert a == b


def test_entries_well_formed():
    k = KondoList.load(ROOT / "data" / "kondo-r9plus")
    assert k.covered == frozenset(range(9, 21))
    for e in k.entries:
        assert e.lattice.signature() == (1, e.rank - 1, 0)


def test_entries_pairwise_distinct_genus():
    k = KondoList.load(ROOT / "data" / "kondo-r9plus")
    for r in range(9, 20):
        es = k.at_rank(r)
        for i in range(len(es)):
            for j in range(i + 1, len(es)):
                assert genus_equal(es[i].lattice, es[j].lattice).kind == "no"
