from __future__ import annotations

import json

import pytest

from hemeroclim.cli import main
from hemeroclim.workspace import data_path


@pytest.fixture()
def data_dir(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text(data_path("sample_corpus.jsonl").read_text(encoding="utf-8"), encoding="utf-8")
    root = tmp_path / "state"
    assert main(["--data-dir", str(root), "ingest", "--input", str(corpus)]) == 0
    return root


def run(data_dir, *argv) -> int:
    return main(["--data-dir", str(data_dir), *argv])


def test_ingest_and_index(data_dir, capsys):
    assert run(data_dir, "index", "--rebuild") == 0
    out = capsys.readouterr().out
    assert "indexed 36 articles" in out


def test_ingest_reports_rejections(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "x", "date": "1805", "text": ""}\n', encoding="utf-8")
    code = main(["--data-dir", str(tmp_path / "s"), "ingest", "--input", str(bad)])
    assert code == 1
    assert "rejected line 1" in capsys.readouterr().out


def test_ingest_with_mapping(tmp_path, capsys):
    source = tmp_path / "export.jsonl"
    source.write_text(
        json.dumps(
            {
                "identificador": "m1",
                "fecha": "1805",
                "texto": "Una tormenta breve.",
                "periodico": "Gazeta",
                "pais": "MX",
            },
            ensure_ascii=False,
        )
        + "\n",
        encoding="utf-8",
    )
    mapping = tmp_path / "mapping.json"
    mapping.write_text(
        json.dumps(
            {
                "identificador": "id",
                "fecha": "date",
                "texto": "text",
                "periodico": "newspaper.name",
                "pais": "newspaper.country",
            }
        ),
        encoding="utf-8",
    )
    code = main(
        ["--data-dir", str(tmp_path / "s"), "ingest", "--input", str(source), "--mapping", str(mapping)]
    )
    assert code == 0
    assert "accepted: 1" in capsys.readouterr().out


def test_pipeline_run_all_and_single(data_dir, capsys):
    assert run(data_dir, "pipeline", "run", "--all") == 0
    assert "candidates: 32" in capsys.readouterr().out
    assert run(data_dir, "pipeline", "run", "--article", "uy-001") == 0
    assert "tasks created: 0" in capsys.readouterr().out  # already queued


def test_query_run_with_rewrites(data_dir, capsys):
    code = run(
        data_dir,
        "query", "run",
        "--q", "tormenta fuerte",
        "--extend", "--localize", "MX", "--rules",
        "--geo", "Mexico City,500",
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "chaparrón" in out
    assert "wind_speed_kmh > 118" in out
    assert "reach_km <= 500" in out


def test_query_parse_error_exit_code(data_dir, capsys):
    assert run(data_dir, "query", "run", "--q", "a AND (") == 1
    assert "parse_error" in capsys.readouterr().err


def test_curate_flow(data_dir, capsys):
    run(data_dir, "pipeline", "run", "--all")
    capsys.readouterr()
    run(data_dir, "curate", "list", "--limit", "100")
    lines = [l for l in capsys.readouterr().out.splitlines() if "\tuy-001\t" in l]
    task_id = lines[0].split("\t")[0]

    run(data_dir, "curate", "show", task_id)
    task = json.loads(capsys.readouterr().out)
    trigger_span = task["candidate"]["trigger_terms"][0][1]
    key = ":".join(str(x) for x in trigger_span)
    location_key = next(iter(task["proposed_geo"]))
    entry = next(e for e in task["proposed_geo"][location_key] if e["country"] == "UY")

    assert run(data_dir, "curate", "apply", task_id, "--kind", "correct_term",
               "--payload", json.dumps({"span": key, "keep": True})) == 0
    assert run(data_dir, "curate", "apply", task_id, "--kind", "confirm_location",
               "--payload", json.dumps({"span": location_key, "entry": entry})) == 0
    assert run(data_dir, "curate", "apply", task_id, "--kind", "set_date",
               "--payload", json.dumps({"date": "1805-01-12"})) == 0
    capsys.readouterr()
    assert run(data_dir, "curate", "promote", task_id) == 0
    event = json.loads(capsys.readouterr().out)
    assert event["scope"][0]["locationName"] == "Montevideo"

    assert run(data_dir, "events", "query", "--period", "XIX c.") == 0
    assert run(data_dir, "events", "famous", "--k", "3") == 0
    assert run(data_dir, "events", "evolution", "--term", "tormenta") == 0


def test_events_heatmap_export(data_dir, tmp_path, capsys):
    out_file = tmp_path / "grid.geojson"
    assert run(data_dir, "events", "heatmap", "--out", str(out_file)) == 0
    doc = json.loads(out_file.read_text(encoding="utf-8"))
    assert doc["type"] == "FeatureCollection"


def test_vocab_commands(data_dir, capsys):
    assert run(data_dir, "vocab", "add", "refusilo", "--country", "UY") == 0
    assert run(data_dir, "vocab", "expand", "tormenta") == 0
    out = capsys.readouterr().out
    assert "tempestad" in out
    assert run(data_dir, "vocab", "tf", "--country", "UY", "--top", "3") == 0
