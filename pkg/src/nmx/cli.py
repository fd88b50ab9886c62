"""Command-line interface: validate, diagnose, match, serve, bench."""

from __future__ import annotations

import json
import os
import random
import sys
import time

import click

from .bundled import bundled_kb_path
from .dialog import DIAGNOSED, NO_MATCH_TEXT, Session
from .dsl import KnowledgeBase, NmxError, parse_file, validate
from .memory import WorkingMemory, WorkingMemoryError, facts_from_json
from .rete import compile_network, naive_match

EXIT_VALIDATION = 1
EXIT_IO = 3


def _load_kb(path) -> KnowledgeBase:
    try:
        return parse_file(path)
    except NmxError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)


_KB_OPTION = click.option(
    "--kb", "kb_path", default=None, metavar="PATH",
    help="Rule file to load (defaults to the bundled knowledge base).")


def _kb_or_bundled(kb_path) -> KnowledgeBase:
    return _load_kb(kb_path if kb_path is not None else bundled_kb_path())


@click.group()
@click.version_option(package_name="nmx", prog_name="nmx")
def main():
    """Rule-based diagnostic shell: parse rules, match facts, run dialogs."""


@main.command("validate")
@click.argument("kb_file", metavar="KB_FILE")
def validate_cmd(kb_file):
    """Parse and lint KB_FILE; exit nonzero if any error is found."""
    kb = _load_kb(kb_file)
    diagnostics = validate(kb)
    for diag in diagnostics:
        click.echo(f"{diag.severity} {diag.code}: {diag.message}", err=True)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        sys.exit(EXIT_VALIDATION)


@main.command("diagnose")
@_KB_OPTION
def diagnose_cmd(kb_path):
    """Run an interactive yes/no consultation on the terminal."""
    kb = _kb_or_bundled(kb_path)
    session = Session(kb)
    click.echo("Answer each question with yes or no (y/n). Ctrl-C aborts.")
    while session.status == "in_progress":
        step = session.next_step()
        if step.kind != "question":
            break
        raw = click.prompt(
            step.prompt,
            type=click.Choice(["yes", "no", "y", "n"], case_sensitive=False),
            show_choices=False,
        )
        answer = "yes" if raw.lower() in ("yes", "y") else "no"
        session.submit_answer(step.ident, answer)
    click.echo()
    if session.status == DIAGNOSED:
        for rec in session.recommendations:
            click.echo(rec.diagnosis)
            if rec.tests:
                click.echo(f"  Tests: {rec.tests}")
            if rec.treatments:
                click.echo(f"  Treatment: {rec.treatments}")
        click.echo()
        click.echo("This tool is a teaching aid, not medical advice; "
                   "consult a clinician.")
    else:
        click.echo(NO_MATCH_TEXT)


@main.command("match")
@_KB_OPTION
@click.option("--facts", "facts_path", required=True, metavar="PATH",
              help="JSON file holding a list of {template, slots} facts.")
@click.option("--engine", type=click.Choice(["rete", "naive"]), default="rete",
              show_default=True, help="Matcher implementation to run.")
def match_cmd(kb_path, facts_path, engine):
    """Match a JSON fact list against the KB; print rule activations."""
    kb = _kb_or_bundled(kb_path)
    try:
        with open(facts_path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)
    except json.JSONDecodeError as exc:
        click.echo(f"error: {facts_path}: {exc}", err=True)
        sys.exit(EXIT_IO)
    try:
        decoded = facts_from_json(data)
    except WorkingMemoryError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)

    wm = WorkingMemory(kb)
    try:
        if engine == "rete":
            network = compile_network(kb)
            network.attach(wm)
            for template, slots in decoded:
                wm.assert_fact(template, slots)
            matches = network.activation_set()
        else:
            for template, slots in decoded:
                wm.assert_fact(template, slots)
            matches = naive_match(kb, wm)
    except WorkingMemoryError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)

    rows = [{"rule": rule, "fact_ids": list(fact_ids)}
            for rule, fact_ids in sorted(matches)]
    click.echo(json.dumps(rows, indent=2))


@main.command("serve")
@_KB_OPTION
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("--static", "static_dir", default=None, metavar="DIR",
              type=click.Path(exists=True, file_okay=False),
              help="Serve this directory at / alongside the API.")
@click.option("--log", "log_path", default=None, metavar="PATH",
              help="Append session events to this JSON-lines file "
                   "(default: $NMX_LOG if set).")
def serve_cmd(kb_path, host, port, static_dir, log_path):
    """Run the HTTP session service."""
    import uvicorn

    from .service import create_app

    if log_path is None:
        log_path = os.environ.get("NMX_LOG") or None
    app = create_app(kb_path, static_dir=static_dir, log_path=log_path)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("bench")
@_KB_OPTION
@click.option("--facts", "n_facts", required=True, type=int, metavar="N",
              help="Number of synthetic facts to assert.")
@click.option("--seed", default=0, show_default=True, type=int)
def bench_cmd(kb_path, n_facts, seed):
    """Assert N synthetic facts and report matcher counters as JSON."""
    kb = _kb_or_bundled(kb_path)
    if n_facts < 0:
        raise click.BadParameter("N must be nonnegative", param_hint="--facts")

    # Value pools mix constants the rules test for with filler symbols, so
    # a slice of the generated facts actually exercises the join chains.
    pools: dict[tuple[str, str], list] = {}
    for template in kb.templates:
        for slot in template.slots:
            pools[(template.name, slot)] = [f"filler-{i}" for i in range(3)]
    for rule in kb.rules:
        for pattern in rule.patterns:
            for slot, value in pattern.constant_tests().items():
                pool = pools[(pattern.template, slot)]
                if value not in pool:
                    pool.append(value)

    rng = random.Random(seed)
    template_names = [t.name for t in kb.templates]
    generated = []
    for _ in range(n_facts):
        name = rng.choice(template_names)
        template = kb.template(name)
        slots = {slot: rng.choice(pools[(name, slot)])
                 for slot in template.slots}
        generated.append((name, slots))

    wm = WorkingMemory(kb)
    network = compile_network(kb)
    network.attach(wm)
    start = time.perf_counter()
    for name, slots in generated:
        wm.assert_fact(name, slots)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    report = network.snapshot_counters().to_json_obj()
    report["wall_time_ms"] = round(elapsed_ms, 3)
    click.echo(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
