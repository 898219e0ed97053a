import json
import os
import subprocess
import sys

import pytest
import rdflib

from aml2rdf.cli import default_base_iri, main

from conftest import FIXTURES


def run(*args, env_base=None, cwd=None):
    env = {k: v for k, v in os.environ.items() if k != "AML2RDF_BASE_IRI"}
    if env_base:
        env["AML2RDF_BASE_IRI"] = env_base
    return subprocess.run([sys.executable, "-m", "aml2rdf", *map(str, args)],
                          capture_output=True, env=env, cwd=cwd, timeout=60)


def fx(name):
    return FIXTURES / name


def test_map_ntriples_default_base():
    proc = run("map", fx("attribute_instance.aml"))
    assert proc.returncode == 0
    assert proc.stderr == b""
    assert b"<urn:aml:attribute_instance/44806a23-d2bd-45d2-8344>" in proc.stdout
    rdflib.Graph().parse(data=proc.stdout.decode(), format="nt")


def test_map_is_byte_identical():
    first = run("map", fx("four_tank.aml"))
    second = run("map", fx("four_tank.aml"))
    assert first.returncode == 0 and first.stdout == second.stdout


def test_map_turtle_parses():
    proc = run("map", fx("typed_instance.aml"), "--format", "turtle", "--base-iri", "urn:aml:test/")
    assert proc.returncode == 0
    g = rdflib.Graph().parse(data=proc.stdout.decode(), format="turtle")
    nt = run("map", fx("typed_instance.aml"), "--base-iri", "urn:aml:test/").stdout.decode()
    assert len(g) == len(nt.splitlines())


def test_output_file(tmp_path):
    out = tmp_path / "out.nt"
    proc = run("map", fx("internal_link.aml"), "-o", out)
    assert proc.returncode == 0 and proc.stdout == b""
    assert out.read_bytes() == run("map", fx("internal_link.aml")).stdout


def test_env_base_and_flag_precedence():
    from_env = run("map", fx("attribute_instance.aml"), env_base="http://example.org/plant/")
    assert b"<http://example.org/plant/44806a23-d2bd-45d2-8344>" in from_env.stdout
    flagged = run("map", fx("attribute_instance.aml"), "--base-iri", "urn:aml:x/", env_base="http://example.org/plant/")
    assert b"<urn:aml:x/44806a23-d2bd-45d2-8344>" in flagged.stdout


def test_default_base_iri(monkeypatch):
    monkeypatch.delenv("AML2RDF_BASE_IRI", raising=False)
    assert default_base_iri("dir/My Plant.aml") == "urn:aml:My%20Plant/"
    monkeypatch.setenv("AML2RDF_BASE_IRI", "urn:other/")
    assert default_base_iri("x.aml") == "urn:other/"


def test_no_labels():
    proc = run("map", fx("attribute_instance.aml"), "--no-labels")
    assert b"rdf-schema#label" not in proc.stdout


def test_select_roles():
    exact = run("query", "select", fx("role_hierarchy.aml"), "--role", "MyRcLib/Vessel")
    assert exact.returncode == 0
    assert exact.stdout == b"urn:aml:role_hierarchy/44806a23-d2bd-45d2-8344\n"
    trans = run("query", "select", fx("role_hierarchy.aml"), "--degree", "transitive",
                "--role", "<urn:aml:role_hierarchy/AutomationMLBaseRoleClassLib/AutomationMLBaseRole/Resource>")
    assert trans.stdout.decode().split() == ["urn:aml:role_hierarchy/44806a23-d2bd-45d2-8344",
                                             "urn:aml:role_hierarchy/9d1c6b0e-77a2-4f31-b2c8"]


def test_select_unknown_role_is_empty():
    proc = run("query", "select", fx("role_hierarchy.aml"), "--role", "MyRcLib/Nope")
    assert (proc.returncode, proc.stdout) == (0, b"")


def test_flow_modes():
    both = run("query", "flow", fx("four_tank.aml"))
    gated = run("query", "flow", fx("four_tank.aml"), "--mode", "valve-state")
    assert both.returncode == gated.returncode == 0
    assert len(both.stdout.splitlines()) == 92
    assert set(gated.stdout.splitlines()) < set(both.stdout.splitlines())
    assert all(b"AutomationML#flows>" in line for line in gated.stdout.splitlines())


def test_flow_custom_port_class():
    proc = run("query", "flow", fx("four_tank.aml"), "--port-class", "MyIcLib/Nope")
    assert (proc.returncode, proc.stdout) == (0, b"")


@pytest.mark.parametrize("name, code, count", [
    ("sensorport_valid.aml", 0, 0), ("sensorport_doubled.aml", 3, 1), ("sensorport_mislinked.aml", 3, 1)])
def test_validate_sensorport(name, code, count):
    proc = run("validate", fx(name), "--rules", fx("sensorport.rules"), "--base-iri", "urn:aml:plant/", "--json")
    assert proc.returncode == code
    report = json.loads(proc.stdout)
    assert report["conforms"] is (code == 0)
    assert len(report["violations"]) == count


def test_validate_text_output():
    proc = run("validate", fx("sensorport_doubled.aml"), "--rules", fx("sensorport.rules"),
               "--base-iri", "urn:aml:plant/")
    assert proc.stdout.startswith(b"conforms: false (1 violations)")
    assert b"[spi-cardinality]" in proc.stdout


def test_validate_structural():
    assert run("validate", fx("four_tank.aml"), "--structural").returncode == 0
    proc = run("validate", fx("missing_id.aml"), "--structural", "--json")
    assert proc.returncode == 3
    assert json.loads(proc.stdout)["violations"][0]["rule_id"] == "MISSING_MANDATORY_ID"


def test_validate_needs_rules_or_structural():
    assert run("validate", fx("four_tank.aml")).returncode == 2


def test_malformed_rules_exit_2():
    proc = run("validate", fx("four_tank.aml"), "--rules", fx("malformed.rules"))
    assert proc.returncode == 2
    assert b"line 1" in proc.stderr and proc.stdout == b""


def test_missing_input_exit_2(tmp_path):
    proc = run("map", tmp_path / "absent.aml")
    assert proc.returncode == 2
    assert proc.stderr.startswith(b"error: cannot read")


def test_bad_base_iri_exit_2():
    assert run("map", fx("attribute_instance.aml"), "--base-iri", "no-separator").returncode == 2


def test_parse_error_exit_1(tmp_path):
    broken = tmp_path / "broken.aml"
    broken.write_bytes(b"<CAEXFile><InstanceHierarchy Name='x'></CAEXFile>")
    proc = run("map", broken)
    assert proc.returncode == 1
    assert b"MALFORMED_XML" in proc.stderr and proc.stdout == b""


def test_cycle_exit_1():
    proc = run("map", fx("cyclic_hierarchy.aml"))
    assert proc.returncode == 1
    assert b"CYCLIC_HIERARCHY" in proc.stderr


def test_warnings_go_to_stderr_and_strict_fails():
    lenient = run("map", fx("dangling_role.aml"))
    assert lenient.returncode == 0
    assert lenient.stderr.decode().count("DANGLING_REF") == 1
    assert b"DANGLING_REF" not in lenient.stdout
    assert run("map", fx("dangling_role.aml"), "--strict").returncode == 1


@pytest.mark.parametrize("argv", [[], ["map"], ["frobnicate", "x.aml"], ["query", "select", "x.aml"],
                                  ["query", "flow", "x.aml", "--mode", "sideways"]])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert "validate" in capsys.readouterr().out


def test_console_script_entry_point():
    proc = subprocess.run(["aml2rdf", "--help"], capture_output=True, timeout=60)
    assert proc.returncode == 0
