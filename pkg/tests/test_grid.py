import numpy as np
import pytest

from pseudoplap.grid import (
    FieldFormatError,
    GridSpec,
    NodeClass,
    ScalarField,
    classify_nodes,
    interior_ball_nodes,
    node_coordinates,
    nonexterior_mask,
    read_field,
    write_field,
)


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(4, 9)
    with pytest.raises(ValueError):
        GridSpec(2, 8)  # even
    with pytest.raises(ValueError):
        GridSpec(2, 7)  # too small
    with pytest.raises(ValueError):
        GridSpec(2, 9, "torus")


def test_spacing_exact():
    g = GridSpec(1, 9)
    assert g.spacing == 2.0 / 8.0
    assert g.axis_coords()[0] == -1.0 and g.axis_coords()[-1] == 1.0


def test_classify_1d_endpoints_boundary():
    g = GridSpec(1, 9)
    cls = classify_nodes(g)
    assert cls[0] == NodeClass.BOUNDARY and cls[-1] == NodeClass.BOUNDARY
    assert (cls[1:-1] == NodeClass.INTERIOR).all()


def test_classify_2d_corner_exterior_origin_interior():
    g = GridSpec(2, 9)
    cls = classify_nodes(g)
    assert cls[-1, -1] == NodeClass.EXTERIOR  # (1, 1), |x| = sqrt(2)
    assert cls[4, 4] == NodeClass.INTERIOR  # origin


def test_classification_total_and_deterministic():
    for g in (GridSpec(2, 17), GridSpec(3, 9), GridSpec(2, 17, "cube")):
        cls = classify_nodes(g)
        assert set(np.unique(cls)) <= {0, 1, 2}
        assert np.array_equal(cls, classify_nodes(g))


def test_cube_has_no_exterior():
    g = GridSpec(2, 9, "cube")
    cls = classify_nodes(g)
    assert (cls != NodeClass.EXTERIOR).all()
    assert cls[0, 3] == NodeClass.BOUNDARY
    assert (cls[1:-1, 1:-1] == NodeClass.INTERIOR).all()


def test_disk_area_fraction():
    g = GridSpec(2, 129)
    in_ball = (classify_nodes(g) != NodeClass.EXTERIOR).mean()
    assert abs(in_ball - np.pi / 4.0) < 0.02
    # the strict interior count converges to the same limit from below
    frac_int = (classify_nodes(g) == NodeClass.INTERIOR).mean()
    assert frac_int < in_ball < np.pi / 4.0 + 0.02


def test_interior_ball_nodes_1d():
    g = GridSpec(1, 9)
    pts = node_coordinates(g, interior_ball_nodes(g, 0.5)).ravel()
    assert np.allclose(sorted(pts), [-0.5, -0.25, 0.0, 0.25, 0.5])


def test_interior_ball_nodes_monotone_in_r():
    g = GridSpec(1, 9)
    small = {tuple(i) for i in interior_ball_nodes(g, 0.5)}
    big = {tuple(i) for i in interior_ball_nodes(g, 1.0 - g.spacing)}
    assert small <= big


def test_interior_ball_nodes_disk_count():
    g = GridSpec(2, 65)
    count = len(interior_ball_nodes(g, 0.5))
    expected = np.pi * 0.25 / g.spacing**2
    assert abs(count - expected) / expected < 0.05


def test_interior_ball_nodes_rejects_bad_radius():
    g = GridSpec(2, 17)
    with pytest.raises(ValueError):
        interior_ball_nodes(g, 1.0)
    with pytest.raises(ValueError):
        interior_ball_nodes(g, 1.5)


def test_field_roundtrip_bitwise(tmp_path):
    rng = np.random.default_rng(0)
    for g in (GridSpec(2, 9), GridSpec(1, 9), GridSpec(2, 9, "cube"), GridSpec(3, 9)):
        vals = np.where(nonexterior_mask(g), rng.standard_normal(g.node_shape), np.nan)
        f = ScalarField(g, vals)
        path = tmp_path / "f.csv"
        write_field(path, f)
        back = read_field(path)
        mask = nonexterior_mask(g)
        assert np.array_equal(back.values[mask], f.values[mask])
        back2 = read_field(path, g)
        assert np.array_equal(back2.values[mask], f.values[mask])


def test_read_header_only_rejected(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("x1,x2,value\n")
    with pytest.raises(FieldFormatError, match="header only"):
        read_field(path)


def test_read_nan_rejected_with_line(tmp_path):
    g = GridSpec(1, 9)
    f = ScalarField(g, np.zeros(9))
    path = tmp_path / "f.csv"
    write_field(path, f)
    lines = path.read_text().splitlines()
    lines[3] = lines[3].rsplit(",", 1)[0] + ",NaN"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(FieldFormatError, match=":4"):
        read_field(path)


def test_read_malformed_row_has_line_number(tmp_path):
    g = GridSpec(1, 9)
    write_field(tmp_path / "f.csv", ScalarField(g, np.zeros(9)))
    lines = (tmp_path / "f.csv").read_text().splitlines()
    lines[5] = "0.25"
    (tmp_path / "f.csv").write_text("\n".join(lines) + "\n")
    with pytest.raises(FieldFormatError, match=":6"):
        read_field(tmp_path / "f.csv")


def test_read_dimension_mismatch(tmp_path):
    g = GridSpec(1, 9)
    write_field(tmp_path / "f.csv", ScalarField(g, np.zeros(9)))
    with pytest.raises(FieldFormatError, match="dimension"):
        read_field(tmp_path / "f.csv", GridSpec(2, 9))


def test_exterior_values_are_unset_marker():
    g = GridSpec(2, 9)
    f = ScalarField.from_function(g, lambda pts: np.ones(len(pts)))
    assert np.isnan(f.values[0, 0])
    assert f.values[4, 4] == 1.0


def test_validate_finite_names_node():
    g = GridSpec(1, 9)
    vals = np.zeros(9)
    vals[3] = np.inf
    with pytest.raises(ValueError, match=r"\(3,\)"):
        ScalarField(g, vals).validate_finite()
