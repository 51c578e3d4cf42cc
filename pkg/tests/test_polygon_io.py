# tests/test_polygon_io.py
import pytest

from services.decomposition import DecompositionConfig, build_sc_regions
from services.errors import NotSimple, ParseError, RenderError, TooFewVertices
from services.guarding import build_all_guarding_regions
from services.polygon_io import (
    corpus_names,
    format_polygon,
    load_corpus,
    parse_polygon,
    parse_polygon_text,
    render_svg,
)
from tests.conftest import F, pt


def test_parse_comments_blank_lines_and_rationals():
    poly = parse_polygon_text("# 三角形\n0 0\n\n1/2 0   # 註解\n0 0.25\n")
    assert poly.vertices == (pt(0, 0), pt(F(1, 2), 0), pt(0, F(1, 4)))


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        parse_polygon_text("0 0\n1 x\n0 1\n")
    assert (info.value.line, info.value.column) == (2, 3)
    assert info.value.exit_code == 2


def test_parse_wrong_arity():
    with pytest.raises(ParseError) as info:
        parse_polygon_text("0 0\n1 0 5\n0 1\n")
    assert (info.value.line, info.value.column) == (2, 5)


def test_parse_validates_polygon():
    with pytest.raises(TooFewVertices):
        parse_polygon_text("0 0\n1 1\n")
    with pytest.raises(NotSimple):
        parse_polygon_text("0 0\n2 2\n2 0\n0 2\n")


def test_parse_missing_file(tmp_path):
    with pytest.raises(ParseError):
        parse_polygon(tmp_path / "nope.poly")


def test_format_round_trip(tmp_path, lshape):
    path = tmp_path / "l.poly"
    path.write_text(format_polygon(lshape), encoding="utf-8")
    assert parse_polygon(path) == lshape


def test_corpus_is_loadable():
    names = corpus_names()
    assert {"square", "pentagon", "lshape", "comb3", "comb5", "star8", "random12"} <= set(names)
    for name in names:
        assert load_corpus(name).n >= 3


def test_render_svg(tmp_path, lshape):
    cells = build_sc_regions(lshape, DecompositionConfig())
    grs = build_all_guarding_regions(lshape, cells)
    out = tmp_path / "l.svg"
    svg = render_svg(lshape, cells, grs, [pt(F(1, 2), F(1, 2))], out)
    assert "<svg" in svg and svg.rstrip().endswith("</svg>")
    assert svg.count('class="cell"') == 3
    assert svg.count('class="guard"') == 1
    assert out.read_text(encoding="utf-8") == svg


def test_render_svg_unwritable(tmp_path, lshape):
    cells = build_sc_regions(lshape, DecompositionConfig())
    with pytest.raises(RenderError):
        render_svg(lshape, cells, [], [], tmp_path / "missing" / "x.svg")
