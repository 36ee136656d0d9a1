"""The heuristic language: parse, check, interpret and canonicalize."""
from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .ast import Diagnostic, DslError, Program, RuntimeFault
from .canon import CanonicalForm, canonicalize, canonicalize_text, is_synonymous, render
from .checker import check
from .interp import CompiledProgram, interpret
from .parser import extract_marked, parse, wrap_marked


def validate(source: str, slot: str) -> tuple[Program | None, list[Diagnostic]]:
    """Parse and check; returns the program (or None) and any diagnostics."""
    try:
        program = parse(source, slot)
    except DslError as exc:
        return None, exc.diagnostics
    diags = check(program)
    return (program if not diags else None), diags


@lru_cache(maxsize=512)
def compile_source(source: str, slot: str) -> CompiledProgram:
    program, diags = validate(source, slot)
    if program is None:
        raise DslError(diags)
    return CompiledProgram(program)


def transcription(preset_id: str) -> str:
    """Shipped DSL source (with markers) of a native preset."""
    slot, variant = preset_id.split("/", 1)
    name = f"{slot}.{variant}.dsl"
    return resources.files(__package__).joinpath("transcriptions", name).read_text()


def transcription_program(preset_id: str) -> Program:
    slot = preset_id.split("/", 1)[0]
    text = transcription(preset_id)
    body = extract_marked(text, slot)
    if body is None:
        raise ValueError(f"transcription {preset_id!r} lacks markers")
    return parse(body, slot)


__all__ = [
    "CanonicalForm", "CompiledProgram", "Diagnostic", "DslError", "Program", "RuntimeFault",
    "canonicalize", "canonicalize_text", "check", "compile_source", "extract_marked",
    "interpret", "is_synonymous", "parse", "render", "transcription", "transcription_program",
    "validate", "wrap_marked",
]
