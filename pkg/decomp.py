# decomposer.py
import logging
from argparse import Namespace
from typing import Any, Dict, Type

from context import (
    BaseContext, BenchContext, GenGraphContext, SolveContext, SuccessTableContext, VerifyContext
)
from steps import default_out_dir, default_seed


CONTEXT_MAPPING = {
    "gen-graph": GenGraphContext,
    "solve": SolveContext,
    "success-table": SuccessTableContext,
    "bench": BenchContext,
    "verify": VerifyContext,
}


class Decomposer:
    """Turns the parsed flags of one subcommand into its context object."""

    def __init__(self, args: Namespace, command: str):
        logging.info(f"[Decomposer] Initializing for command: {command}")
        self.args = args
        self.command = command
        self.context_class: Type[BaseContext]

        self.load_context_class()

    def load_context_class(self):
        if self.command not in CONTEXT_MAPPING:
            raise ValueError(f"[Decomposer] No context schema found for command: {self.command}")
        self.context_class = CONTEXT_MAPPING[self.command]

    def collect(self) -> Dict[str, Any]:
        # flags left unset on the command line fall back to the model defaults
        data = {k: v for k, v in vars(self.args).items() if v is not None and k in self.context_class.model_fields}
        data["command"] = self.command
        data.setdefault("seed", default_seed())
        data.setdefault("out", default_out_dir())
        return data

    def run(self) -> BaseContext:
        context = self.context_class.model_validate(self.collect())
        logging.info(f"[Decomposer] Context built for {self.command}.")
        logging.debug(f"[Decomposer] Context Object:\n{context}")
        return context
