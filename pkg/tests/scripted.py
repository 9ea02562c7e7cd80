"""Provider double that follows a per-section pass/fail script."""

import re
import threading

from supplyscope.model import RiskDomain, RiskFactorRow
from supplyscope.synthesis import KEY_CONCEPTS, ProviderError, SynthesisProvider, render_rows
from supplyscope.synthesis.prompts import parse_prompt_header

_ID = re.compile(r"^\[(ev-[0-9a-f]{12})\]", re.M)


class ScriptedProvider(SynthesisProvider):
    """Emits a table per (domain, iteration) following a script.

    Script values: "pass" (complete, quantified, cited), "vague" (fails the
    quantification check), "garbage" (no table), "error" (raises).
    """

    def __init__(self, script=None, default="pass"):
        self.script = script or {}
        self.default = default
        self.calls = []
        self._lock = threading.Lock()

    def synthesize(self, prompt):
        head = parse_prompt_header(prompt)
        if head.get("task") == "plan":
            return ""
        domain = RiskDomain.parse(head["domain"])
        it = int(head["iteration"])
        with self._lock:
            self.calls.append((domain, it))
        steps = self.script.get(domain, [])
        mode = steps[it - 1] if it <= len(steps) else self.default
        if mode == "error":
            raise ProviderError("scripted outage")
        if mode == "garbage":
            return "Sorry, I cannot help with that."
        ids = _ID.findall(prompt)
        rows = [
            RiskFactorRow(
                factor=concept,
                observed="broadly fine" if mode == "vague" else f"{n + 2} observations",
                rating=3,
                justification="from evidence",
                control="review",
                citations=(ids[0],) if ids else (),
                missing_info=not ids,
            )
            for n, concept in enumerate(KEY_CONCEPTS[domain])
        ]
        if not ids:
            rows = [RiskFactorRow(r.factor, "not found", 1, r.justification, r.control, (), True) for r in rows]
        return render_rows(rows)
