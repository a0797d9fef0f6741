import pytest

from weakmatch.tables import Table, TablePair, Tuple
from weakmatch.textkit import CorpusStats


def make_pair(left_rows, right_rows, schema):
    """Build a TablePair from (id, {attr: value}) rows."""
    def table(rows):
        return Table(schema, [
            Tuple(id=tid, attributes={a: attrs.get(a, "") for a in schema})
            for tid, attrs in rows
        ])
    return TablePair(left=table(left_rows), right=table(right_rows), schema=list(schema))


@pytest.fixture
def tv_tables():
    """Small catalog with name/description/price, matching in spirit
    the product-feed tuples that motivate most tests."""
    schema = ["name", "description", "price"]
    left = [
        ("L1", {"name": "Sony Switcher SBV40S",
                "description": "sony sbv40s 4 way audio video switcher",
                "price": "49.00"}),
        ("L2", {"name": "Sony Bravia 40in LCD TV KDL40V",
                "description": "bravia v series 40 inch lcd television black",
                "price": "1399.00"}),
        ("L3", {"name": "Apex Digital Converter Box DT250A",
                "description": "apex digital to analog converter box remote",
                "price": "59.95"}),
    ]
    right = [
        ("R1", {"name": "Sony SBV40S A/V Switcher",
                "description": "sony 4 way av switcher sbv40s",
                "price": "44.99"}),
        ("R2", {"name": "Sony Bravia 46in LCD TV KDL46V",
                "description": "bravia v series 46 inch lcd television black",
                "price": "1699.00"}),
        ("R3", {"name": "Apex DT250A Converter",
                "description": "digital converter box with remote apex",
                "price": "57.00"}),
    ]
    return make_pair(left, right, schema)


@pytest.fixture
def tv_corpus(tv_tables):
    return CorpusStats.from_tables(tv_tables)
