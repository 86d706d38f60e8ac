import pytest

from gcdfabric import _engine
from gcdfabric.netlist import NetlistBuilder


@pytest.fixture(params=_engine.available_backends())
def backend(request):
    """Run the test once per available evaluation backend."""
    previous = _engine.get_backend()
    _engine.set_backend(request.param)
    yield request.param
    _engine.set_backend(previous)


def build_ripple_comparator(width, nand_only=True):
    """Cascaded 1-bit borrow stages; ``gt`` is the final borrow of ``b - a``."""
    bld = NetlistBuilder(f"ripple_cmp{width}", nand_only=nand_only, width_hint=width)
    a = bld.add_input("a", width)
    b = bld.add_input("b", width)
    borrow = bld.const0
    for x, y in zip(b, a):
        t = bld.xor_(x, y)
        borrow = bld.or_(bld.and_(bld.not_(x), y), bld.and_(bld.not_(t), borrow))
    bld.add_output("gt", borrow)
    return bld.finalize()


@pytest.fixture
def ripple_comparator():
    return build_ripple_comparator
