"""Strict JSON instance ingestion.

An instance file is a single JSON document:

    {
      "agents": [
        {"name": "a1",
         "actions": [{"reward": 10.0, "cost": 2.0}, ...],
         "kappa_s": 1.0, "kappa_i": 1.0, "alpha": 0.0},
        ...
      ],
      "budget": 1
    }

``budget`` is optional (default 1).  Unknown fields anywhere are rejected so
typos in the kappa names cannot silently change the model.  Error messages
carry the JSON path of the offending field; Assumption 1 violations surface
as ValidationError and Assumption 2 violations as InfeasibleSafety, both
prefixed with the agent's name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .envelope import Action
from .errors import ContractError, InfeasibleSafety, ValidationError
from .single_agent import AgentSpec

_AGENT_FIELDS = {"name", "actions", "kappa_s", "kappa_i", "alpha"}
_ACTION_FIELDS = {"reward", "cost"}
_TOP_FIELDS = {"agents", "budget"}


@dataclass(frozen=True)
class NamedAgent:
    name: str
    spec: AgentSpec


@dataclass(frozen=True)
class Instance:
    agents: tuple[NamedAgent, ...]
    budget: int

    @property
    def specs(self) -> tuple[AgentSpec, ...]:
        return tuple(a.spec for a in self.agents)

    def agent(self, name: str) -> NamedAgent:
        for a in self.agents:
            if a.name == name:
                return a
        raise ValidationError(f"no agent named {name!r} in the instance")


def _number(obj: object, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {obj!r}")
    return float(obj)


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"{where}: unknown field(s) {sorted(unknown)}")


def parse_instance(doc: object) -> Instance:
    if not isinstance(doc, dict):
        raise ValidationError("instance document must be a JSON object")
    _reject_unknown(doc, _TOP_FIELDS, "top level")
    if "agents" not in doc or not isinstance(doc["agents"], list) or not doc["agents"]:
        raise ValidationError("'agents' must be a nonempty list")

    budget = doc.get("budget", 1)
    if isinstance(budget, bool) or not isinstance(budget, int) or budget < 1:
        raise ValidationError(f"budget: expected a positive integer, got {budget!r}")

    agents: list[NamedAgent] = []
    for i, raw in enumerate(doc["agents"]):
        where = f"agents[{i}]"
        if not isinstance(raw, dict):
            raise ValidationError(f"{where}: expected an object")
        _reject_unknown(raw, _AGENT_FIELDS, where)
        missing = _AGENT_FIELDS - set(raw)
        if missing:
            raise ValidationError(f"{where}: missing field(s) {sorted(missing)}")
        name = raw["name"]
        if not isinstance(name, str) or not name:
            raise ValidationError(f"{where}.name: expected a nonempty string")
        if not isinstance(raw["actions"], list) or not raw["actions"]:
            raise ValidationError(f"{where}.actions: expected a nonempty list")
        actions = []
        for k, entry in enumerate(raw["actions"]):
            aw = f"{where}.actions[{k}]"
            if not isinstance(entry, dict):
                raise ValidationError(f"{aw}: expected an object")
            _reject_unknown(entry, _ACTION_FIELDS, aw)
            if set(entry) != _ACTION_FIELDS:
                raise ValidationError(
                    f"{aw}: missing field(s) {sorted(_ACTION_FIELDS - set(entry))}"
                )
            actions.append(
                Action(_number(entry["reward"], aw), _number(entry["cost"], aw))
            )
        try:
            spec = AgentSpec(
                tuple(actions),
                _number(raw["kappa_s"], f"{where}.kappa_s"),
                _number(raw["kappa_i"], f"{where}.kappa_i"),
                _number(raw["alpha"], f"{where}.alpha"),
            )
        except ContractError as exc:
            raise type(exc)(f"{where} ({name!r}): {exc}") from None
        slack = max(a.reward - a.cost for a in spec.actions)
        if slack <= spec.kappa_s:
            raise InfeasibleSafety(
                f"{where} ({name!r}): max(R_i - c_i) = {slack} does not exceed "
                f"kappa_s = {spec.kappa_s} (Assumption 2)"
            )
        agents.append(NamedAgent(name, spec))

    names = [a.name for a in agents]
    if len(set(names)) != len(names):
        raise ValidationError("agent names must be unique")
    return Instance(tuple(agents), budget)


def load_instance(path: str | Path) -> Instance:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from None
    return parse_instance(doc)
