"""Acceptance criteria, one test each, at the stated tolerances.

Every test prints one ``criterion <id> PASS|FAIL`` line, repeated in
the "acceptance criteria" section of the pytest summary.  The checks live in
:mod:`sharpconst.verify` so that ``sharpconst verify`` runs the same code.
"""

import pytest

from sharpconst.verify import CHECKS

from conftest import ACCEPTANCE_KEY


@pytest.mark.parametrize("cid", sorted(CHECKS))
def test_criterion(cid, request):
    res = CHECKS[cid](seed=0)
    print(res.line())
    getattr(request.config, ACCEPTANCE_KEY).append(res.line())
    assert res.passed, res.line()
