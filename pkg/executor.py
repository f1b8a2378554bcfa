import inspect
import logging
from typing import Any, Callable, Dict, List, Optional

import steps


class Execute:
    """
    Runs the flow of one command: every step is looked up in the registry,
    called with the arguments it names (taken from the context), and whatever
    dict it returns is written back onto the context.
    """

    def __init__(self, command: str, flow: List[str], context: Any,
                 registry: Optional[Dict[str, Callable]] = None):
        """
        Args:
            command: Name of the subcommand (e.g. "solve")
            flow: List of step function names as strings
            context: Pydantic context built by the Decomposer
        """
        self.command = command
        self.flow = flow
        self.context = context
        self.step_registry: Dict[str, Callable] = dict(registry or steps.STEP_REGISTRY)

    def register_steps(self, step_functions: Dict[str, Callable]):
        self.step_registry.update(step_functions)

    def _arguments(self, func: Callable) -> Dict[str, Any]:
        kwargs = {}
        for name, param in inspect.signature(func).parameters.items():
            if name == "context":
                kwargs[name] = self.context
            elif hasattr(self.context, name):
                kwargs[name] = getattr(self.context, name)
            elif param.default is inspect.Parameter.empty:
                raise ValueError(f"[EXECUTER] step '{func.__name__}' needs '{name}', not found in context")
        return kwargs

    def run(self):
        if not self.flow:
            raise ValueError(f"[EXECUTER] no flow defined for command '{self.command}'")
        for step_name in self.flow:
            if step_name not in self.step_registry:
                raise ValueError(f"[EXECUTER] Step function '{step_name}' not registered.")
            func = self.step_registry[step_name]
            logging.info(f"[EXECUTER] {self.command}: {step_name}")
            result = func(**self._arguments(func))
            if isinstance(result, dict):
                for key, value in result.items():
                    setattr(self.context, key, value)
        return self.context
