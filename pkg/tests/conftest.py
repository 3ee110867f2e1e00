import time
from types import SimpleNamespace

import pytest

from annulus_bvp import solver1, solver2
from annulus_bvp.model import build_case_preset
from annulus_bvp.quadrature import build_quadrature
from annulus_bvp.series import continuation_params, taylor_coefficients


@pytest.fixture(scope="session")
def case_data():
    """Lazy per-case solve cache shared by the whole session.

    ``case_data(cid)`` returns a namespace with the spec, configs, series
    coefficients, moment tables, both solved routes and their wall times.
    """
    cache: dict[str, SimpleNamespace] = {}

    def get(cid: str) -> SimpleNamespace:
        if cid not in cache:
            spec, cfg = build_case_preset(cid)
            params = continuation_params(spec.kappa())
            coeffs = taylor_coefficients(spec, params, cfg.N)
            quad = build_quadrature(spec, params, cfg.N, cfg.M1, cfg.M2)
            t0 = time.perf_counter()
            sol1, rep1 = solver1.run(spec, cfg)
            t_sol1 = time.perf_counter() - t0
            t0 = time.perf_counter()
            sol2, rep2 = solver2.run2(spec, cfg, quad=quad)
            t_sol2 = time.perf_counter() - t0
            cache[cid] = SimpleNamespace(
                cid=cid,
                spec=spec,
                cfg=cfg,
                params=params,
                coeffs=coeffs,
                quad=quad,
                sol1=sol1,
                rep1=rep1,
                sol2=sol2,
                rep2=rep2,
                t_sol1=t_sol1,
                t_sol2=t_sol2,
            )
        return cache[cid]

    return get
