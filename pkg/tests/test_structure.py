import numpy as np
import numpy.testing as npt
import pytest

from stopover import (
    GENERATING_STRUCTURE,
    LogisticSpec,
    ModelStructure,
    StructureError,
    StudyDesign,
    TableSpec,
    apply_move,
    named_structure,
    params_allclose,
    parse_structure,
    random_parameters,
)

FULL_FREE = ModelStructure(
    r="year",
    s=TableSpec(("year", "age")),
    alpha="year",
    psi="year",
    beta="free",
    phi=TableSpec(("year", "occ", "age")),
    p=TableSpec(("year", "occ", "state", "age")),
)


def twelve_year_design():
    # 12 years, 253 occasions total, second state observable from year 9 on
    K = (22,) + (21,) * 11
    assert sum(K) == 253
    avail = tuple((1,) if t <= 8 else (1, 2) for t in range(1, 13))
    return StudyDesign(T=12, K=K, G=2, availability=avail)


TWELVE_YEAR_TEXT = (
    "r=year;s=const;alpha=year;psi=year;"
    "beta=logistic(intercept=shared,slope=year);"
    "phi=logistic(intercept=shared,slope=year);"
    "p=year*state"
)


def test_text_round_trip_generating():
    st = GENERATING_STRUCTURE
    assert parse_structure(st.to_text()) == st


def test_text_round_trip_various():
    texts = [
        "r=const;s=const;alpha=const;psi=const;beta=free;phi=occ*age;p=const",
        TWELVE_YEAR_TEXT,
        "r=year;s=year*age;alpha=year;psi=year;beta=free;phi=year*occ*age;p=year*occ*state*age",
        "r=const;s=age;alpha=const;psi=const;beta=logistic(intercept=year);phi=logistic(occeff=year,age=year);p=state*age",
    ]
    for text in texts:
        st = parse_structure(text)
        assert parse_structure(st.to_text()) == st


def test_parse_rejects_malformed():
    with pytest.raises(StructureError):
        parse_structure("q=year")
    with pytest.raises(StructureError):
        parse_structure("r=sometimes")
    with pytest.raises(StructureError):
        parse_structure("phi=logistic(intercept=shared,occeff=shared)")
    with pytest.raises(StructureError):
        parse_structure("beta=logistic(age=shared)")
    with pytest.raises(StructureError):
        parse_structure("s=year*state")
    with pytest.raises(StructureError):
        parse_structure("r=year;r=const")


def test_named_aliases():
    assert named_structure("constant") == ModelStructure()
    assert named_structure("generating") == GENERATING_STRUCTURE
    assert named_structure("r=year").r == "year"


def test_generating_dimension(scenario100):
    params, design = scenario100
    st = GENERATING_STRUCTURE
    names = st.param_names(design)
    assert len(names) == st.dimension(design) == 18
    assert names[0] == "N"
    assert "beta.slope[t=3]" in names
    assert "phi.occeff[k=4]" in names
    assert names.count("s") == 1


def test_expand_n_transform(tiny_design):
    st = ModelStructure()
    theta = np.zeros(st.dimension(tiny_design))
    params = st.expand(theta, tiny_design, n_observed=106)
    assert params.N == pytest.approx(107.0)


def test_expand_logit_identity(tiny_design):
    st = ModelStructure(p=TableSpec())
    theta = np.zeros(st.dimension(tiny_design))
    params = st.expand(theta, tiny_design, n_observed=10)
    npt.assert_allclose(params.p[0], 0.5)
    npt.assert_allclose(params.s, 0.5)


def test_expand_simplex_symmetry():
    design = StudyDesign(T=4, K=(2, 2, 2, 2), G=1)
    st = ModelStructure(r="year")
    theta = np.zeros(st.dimension(design))
    params = st.expand(theta, design, n_observed=10)
    npt.assert_allclose(params.r, np.full(4, 0.25), atol=1e-15)


def test_expand_dimension_mismatch(tiny_design):
    with pytest.raises(StructureError):
        ModelStructure().expand(np.zeros(3), tiny_design, n_observed=5)


def test_random_theta_yields_valid_parameter_sets(tiny_design):
    # ParameterSet.__init__ revalidates every invariant, so construction
    # succeeding is the assertion
    rng = np.random.default_rng(11)
    structures = [ModelStructure(), GENERATING_STRUCTURE, FULL_FREE]
    for st in structures:
        dim = st.dimension(tiny_design)
        for _ in range(334):
            theta = rng.normal(scale=3.0, size=dim)
            params = st.expand(theta, tiny_design, n_observed=17)
            assert params.N >= 17


def test_unconstrained_round_trip_full_structure(tiny_design, rng):
    st = FULL_FREE
    for _ in range(25):
        params = random_parameters(tiny_design, rng)
        theta = st.extract(params, tiny_design, n_observed=10)
        back = st.expand(theta, tiny_design, n_observed=10)
        assert params_allclose(back, params, atol=1e-10)


def test_unconstrained_round_trip_generating(scenario100):
    params, design = scenario100
    st = GENERATING_STRUCTURE
    theta = st.extract(params, design, n_observed=80)
    back = st.expand(theta, design, n_observed=80)
    assert params_allclose(back, params, atol=1e-8)
    # the arrival inversion recovers the shared intercept and per-year slopes
    names = st.param_names(design)
    coef = dict(zip(names, theta))
    assert coef["beta.intercept"] == pytest.approx(1.0, abs=1e-6)
    assert coef["beta.slope[t=1]"] == pytest.approx(-1.0, abs=1e-6)
    assert coef["beta.slope[t=2]"] == pytest.approx(0.0, abs=1e-6)
    assert coef["beta.slope[t=3]"] == pytest.approx(-2.0, abs=1e-6)
    assert coef["phi.age"] == pytest.approx(-1.0, abs=1e-8)
    assert coef["phi.occeff[k=1]"] == pytest.approx(2.5, abs=1e-8)


def test_theta_round_trip_through_expand(tiny_design, rng):
    # expand -> extract is the identity on fully identified structures; for
    # shared/regression structures only the expansion itself must round-trip
    # (coefficients can be unidentified on small designs)
    theta = rng.normal(scale=1.0, size=FULL_FREE.dimension(tiny_design))
    params = FULL_FREE.expand(theta, tiny_design, n_observed=12)
    npt.assert_allclose(FULL_FREE.extract(params, tiny_design, n_observed=12), theta, atol=1e-6)

    st = GENERATING_STRUCTURE
    theta = rng.normal(scale=1.0, size=st.dimension(tiny_design))
    params = st.expand(theta, tiny_design, n_observed=12)
    back = st.expand(st.extract(params, tiny_design, n_observed=12), tiny_design, n_observed=12)
    assert params_allclose(back, params, atol=1e-8)


def test_twelve_year_model_structure_shape():
    design = twelve_year_design()
    st = parse_structure(TWELVE_YEAR_TEXT)
    names = st.param_names(design)
    # N, 11 recruitment logits, 1 survival, alpha (years 9-12), psi (years
    # 9-12, 2 free entries each), arrival (1 intercept + 12 slopes),
    # retention (1 intercept + 12 slopes), capture (12 + 4 year-state classes)
    assert names.count("s") == 1
    assert sum(1 for n in names if n.startswith("r[")) == 11
    assert sum(1 for n in names if n.startswith("alpha")) == 4
    assert sum(1 for n in names if n.startswith("psi")) == 8
    assert sum(1 for n in names if n.startswith("beta.")) == 13
    assert sum(1 for n in names if n.startswith("phi.")) == 13
    assert sum(1 for n in names if n.startswith("p[")) == 16
    assert len(names) == 1 + 11 + 1 + 4 + 8 + 13 + 13 + 16
    # expansion is a valid parameter set with the availability zeros in place
    theta = np.random.default_rng(5).normal(size=len(names))
    params = st.expand(theta, design, n_observed=106)
    assert params.alpha[0][1] == 0.0
    assert params.alpha[8][1] > 0.0
    assert params.Psi[3][0, 1] == 0.0
    assert abs(params.Psi[10][1, :].sum() - 1.0) < 1e-12


def test_shared_alpha_groups_by_availability():
    design = twelve_year_design()
    st = parse_structure("alpha=const;psi=const;p=state")
    names = st.param_names(design)
    alpha_names = [n for n in names if n.startswith("alpha")]
    assert alpha_names == ["alpha[states=1+2][g=1]"]
    psi_names = [n for n in names if n.startswith("psi")]
    assert psi_names == ["psi[states=1+2][1->1]", "psi[states=1+2][2->1]"]


def test_apply_move_replaces_single_field():
    base = ModelStructure()
    moved = apply_move(base, "s=year")
    assert moved.s == TableSpec(("year",))
    assert moved.p == base.p
    with pytest.raises(StructureError):
        apply_move(base, "year")
    with pytest.raises(StructureError):
        apply_move(base, "zeta=year")
