import pytest

from birgraph.fixtures import case1_star, paper_tree


@pytest.fixture
def tree3():
    return paper_tree([2, -3, 5])


@pytest.fixture
def star5():
    return case1_star(5)
