import pytest

from olap_persona import algebra
from olap_persona.errors import EngineError
from olap_persona.rules import Profile, register_rule
from olap_persona.schema import MeasureSpec

from .conftest import (
    REGION_CLASS_CELLS,
    REGION_DEPT_CLASS_CELLS,
    GRAND_TOTAL,
    RULE_CLIENTS_GEO,
    RULE_TEMPS_DRILL_WEIGHTS,
    RULE_TEMPS_UNCONDITIONAL_ROTATED,
    RULE_TEMPS_VENTES_MONTHLY,
    SUM_MONTANT,
    single_measure_cells,
)


def classic_display(constellation, store, profile=None):
    return algebra.display(
        constellation, store, profile or Profile("vide"),
        "VENTES", [SUM_MONTANT], "CLIENTS", "HGEO", "PRODUITS", "HPRO",
    )


def test_classic_display_shows_coarsest(constellation, store):
    t = classic_display(constellation, store)
    assert t.rows.attrs == ("Région",) and t.cols.attrs == ("Classe",)
    assert single_measure_cells(t.grid) == REGION_CLASS_CELLS


def test_personalized_display_adds_dept(constellation, store):
    profile = Profile("perso")
    register_rule(profile, constellation, RULE_CLIENTS_GEO)
    t = algebra.display(
        constellation, store, profile,
        "VENTES", [SUM_MONTANT], "CLIENTS", "HGEO", "PRODUITS", "HPRO", threshold=0.5,
    )
    assert t.rows.attrs == ("Région", "DeptN")
    assert t.cols.attrs == ("Classe",)  # no column weights: classic fallback
    assert single_measure_cells(t.grid) == REGION_DEPT_CLASS_CELLS


def test_threshold_with_empty_profile_equals_classic(constellation, store):
    classic = classic_display(constellation, store)
    personalized = algebra.display(
        constellation, store, Profile("vide"),
        "VENTES", [SUM_MONTANT], "CLIENTS", "HGEO", "PRODUITS", "HPRO", threshold=0.5,
    )
    assert personalized.rows.attrs == classic.rows.attrs
    assert personalized.cols.attrs == classic.cols.attrs
    assert personalized.grid == classic.grid


def test_classic_rotate(constellation, store):
    t = classic_display(constellation, store)
    rotated = algebra.rotate(constellation, store, Profile("vide"), t, "PRODUITS", "TEMPS", "HTPS")
    assert rotated.cols.dim == "TEMPS" and rotated.cols.attrs == ("Année",)
    assert rotated.rows == t.rows
    total = sum(single_measure_cells(rotated.grid).values())
    assert total == GRAND_TOTAL


def test_rotate_personalized_unconditional(constellation, store):
    profile = Profile("perso")
    register_rule(profile, constellation, RULE_TEMPS_UNCONDITIONAL_ROTATED)
    t = classic_display(constellation, store, profile)
    rotated = algebra.rotate(constellation, store, profile, t, "PRODUITS", "TEMPS", "HTPS", threshold=0.5)
    assert rotated.cols.attrs == ("Année", "Trimestre", "LibelléM")


def test_rotate_personalized_conditional(constellation, store):
    profile = Profile("perso")
    register_rule(profile, constellation, RULE_TEMPS_VENTES_MONTHLY)
    t = classic_display(constellation, store, profile)
    rotated = algebra.rotate(constellation, store, profile, t, "PRODUITS", "TEMPS", "HTPS", threshold=0.5)
    assert rotated.cols.attrs == ("Année", "MoisN")


def test_classic_drilldown_skips_intermediates(constellation, store):
    t = classic_display(constellation, store)
    t = algebra.rotate(constellation, store, Profile("vide"), t, "PRODUITS", "TEMPS", "HTPS")
    drilled = algebra.drilldown(constellation, store, Profile("vide"), t, "TEMPS", "MoisN")
    assert drilled.cols.attrs == ("Année", "MoisN")


def test_personalized_drilldown_adds_intermediate_and_weak(constellation, store):
    profile = Profile("perso")
    register_rule(profile, constellation, RULE_TEMPS_DRILL_WEIGHTS)
    t = classic_display(constellation, store, profile)
    t = algebra.rotate(constellation, store, profile, t, "PRODUITS", "TEMPS", "HTPS")
    drilled = algebra.drilldown(constellation, store, profile, t, "TEMPS", "MoisN", threshold=0.6)
    assert drilled.cols.attrs == ("Année", "Trimestre", "MoisN", "LibelléM")


def test_personalized_rollup_drops_unqualified_coarser(constellation, store):
    profile = Profile("perso")
    register_rule(profile, constellation, RULE_TEMPS_DRILL_WEIGHTS)
    t = classic_display(constellation, store, profile)
    t = algebra.rotate(constellation, store, profile, t, "PRODUITS", "TEMPS", "HTPS")
    t = algebra.drilldown(constellation, store, profile, t, "TEMPS", "MoisN")
    rolled = algebra.rollup(constellation, store, profile, t, "TEMPS", "Trimestre", threshold=0.8)
    assert rolled.cols.attrs == ("Trimestre",)


def test_classic_rollup_keeps_coarser(constellation, store):
    t = classic_display(constellation, store)
    t = algebra.rotate(constellation, store, Profile("vide"), t, "PRODUITS", "TEMPS", "HTPS")
    t = algebra.drilldown(constellation, store, Profile("vide"), t, "TEMPS", "Trimestre")
    t = algebra.drilldown(constellation, store, Profile("vide"), t, "TEMPS", "MoisN")
    assert t.cols.attrs == ("Année", "Trimestre", "MoisN")
    rolled = algebra.rollup(constellation, store, Profile("vide"), t, "TEMPS", "Trimestre")
    assert rolled.cols.attrs == ("Année", "Trimestre")


def test_rollup_to_all_gives_total_line(constellation, store):
    t = classic_display(constellation, store)
    rolled = algebra.rollup(constellation, store, Profile("vide"), t, "CLIENTS", "All")
    assert rolled.rows.attrs == ("All",)
    cells = single_measure_cells(rolled.grid)
    assert set(cells) == {(("All",), (classe,)) for classe in ("Habillement", "Mobilier", "Technologique")}
    assert sum(cells.values()) == GRAND_TOTAL


def test_drilldown_after_rollup_to_all(constellation, store):
    t = classic_display(constellation, store)
    t = algebra.rollup(constellation, store, Profile("vide"), t, "CLIENTS", "All")
    drilled = algebra.drilldown(constellation, store, Profile("vide"), t, "CLIENTS", "Région")
    assert drilled.rows.attrs == ("Région",)


def test_grid_always_matches_fresh_aggregate(constellation, store):
    profile = Profile("perso")
    register_rule(profile, constellation, RULE_CLIENTS_GEO)
    t = algebra.display(
        constellation, store, profile,
        "VENTES", [SUM_MONTANT], "CLIENTS", "HGEO", "PRODUITS", "HPRO", threshold=0.5,
    )
    for op in [
        lambda x: algebra.rotate(constellation, store, profile, x, "PRODUITS", "TEMPS", "HTPS"),
        lambda x: algebra.drilldown(constellation, store, profile, x, "TEMPS", "Trimestre"),
        lambda x: algebra.rollup(constellation, store, profile, x, "TEMPS", "Année"),
    ]:
        t = op(t)
        assert t.grid == algebra.compute_grid(constellation, store, t)


def test_restriction_carried_through(constellation, store):
    from olap_persona.store import Predicate, Restriction
    from olap_persona.schema import resolve_element
    from dataclasses import replace

    t = classic_display(constellation, store)
    r = Restriction((Predicate(resolve_element(constellation, "Clients.HGEO.Région"), "=", "Bretagne"),))
    t = replace(t, restriction=r, grid=algebra.compute_grid(constellation, store, replace(t, restriction=r)))
    rotated = algebra.rotate(constellation, store, Profile("vide"), t, "PRODUITS", "TEMPS", "HTPS")
    assert rotated.restriction == r
    assert sum(single_measure_cells(rotated.grid).values()) == 6700.0  # Bretagne only


def test_measure_weighting_appends_default_aggregation():
    from olap_persona.ddl import parse_schema
    from olap_persona.store import DataStore

    c = parse_schema(
        """
        DEFINE DIMENSION D HIERARCHY H : a -> b ;
        DEFINE DIMENSION E HIERARCHY G : k ;
        DEFINE FACT F ( SUM(x), AVG(y) ) CONNECT D, E ;
        """
    )
    store = DataStore(c)
    store.load_dimension_rows("D", "a,b\na1,b1\na2,b1\n")
    store.load_dimension_rows("E", "k\nk1\n")
    store.load_fact_rows("F", "x,y,d_ref,e_ref\n1,10,a1,k1\n3,20,a2,k1\n")
    profile = Profile("perso")
    register_rule(profile, c, "CREATE RULE m ON F WHEN displayed THEN priority(F.y, 0.9);")

    classic = algebra.display(c, store, profile, "F", [MeasureSpec("SUM", "x")], "D", "H", "E", "G")
    assert classic.specs == (MeasureSpec("SUM", "x"),)

    personalized = algebra.display(
        c, store, profile, "F", [MeasureSpec("SUM", "x")], "D", "H", "E", "G", threshold=0.5
    )
    assert personalized.specs == (MeasureSpec("SUM", "x"), MeasureSpec("AVG", "y"))
    cells = personalized.grid.cells
    assert cells[(("b1",), ("k1",), MeasureSpec("SUM", "x"))] == 4.0
    assert cells[(("b1",), ("k1",), MeasureSpec("AVG", "y"))] == 15.0


# Errors ---------------------------------------------------------------------


def test_same_dimension_on_both_axes(constellation, store):
    with pytest.raises(EngineError) as err:
        algebra.display(
            constellation, store, Profile("vide"),
            "VENTES", [SUM_MONTANT], "CLIENTS", "HGEO", "CLIENTS", "HGEO",
        )
    assert err.value.code == "same-dimension-on-both-axes"


def test_fact_not_starred(constellation, store):
    with pytest.raises(EngineError) as err:
        algebra.display(
            constellation, store, Profile("vide"),
            "ACHATS", [SUM_MONTANT], "CLIENTS", "HGEO", "PRODUITS", "HPRO",
        )
    assert err.value.code == "fact-not-starred"


def test_rotate_dim_not_in_table(constellation, store):
    t = classic_display(constellation, store)
    with pytest.raises(EngineError) as err:
        algebra.rotate(constellation, store, Profile("vide"), t, "TEMPS", "TEMPS", "HTPS")
    assert err.value.code == "dim-not-in-table"


def test_rotation_target_conflict(constellation, store):
    t = classic_display(constellation, store)
    with pytest.raises(EngineError) as err:
        algebra.rotate(constellation, store, Profile("vide"), t, "PRODUITS", "CLIENTS", "HGEO")
    assert err.value.code == "rotation-target-conflict"


def test_drilldown_attr_not_finer(constellation, store):
    t = classic_display(constellation, store)
    t = algebra.drilldown(constellation, store, Profile("vide"), t, "CLIENTS", "Ville")
    with pytest.raises(EngineError) as err:
        algebra.drilldown(constellation, store, Profile("vide"), t, "CLIENTS", "Région")
    assert err.value.code == "attr-not-finer"


def test_rollup_attr_not_coarser(constellation, store):
    t = classic_display(constellation, store)
    with pytest.raises(EngineError) as err:
        algebra.rollup(constellation, store, Profile("vide"), t, "CLIENTS", "CodeCli")
    assert err.value.code == "attr-not-coarser"
