"""
Scenario commands over HTTP - one request runs one batch computation
Same command registry as the robloc CLI
"""
import logging
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field
from fastapi import APIRouter, HTTPException
from fastapi.concurrency import run_in_threadpool

from robust_localization.cli import COMMANDS, RunOptions, execute
from robust_localization.config import get_settings, settings_scope
from robust_localization.scenario import resolve_scenario, scenario_from_dict

# Configure logging
logger = logging.getLogger(__name__)

# Initialize router
router = APIRouter()


class ScenarioRequest(BaseModel):
    scenario: Optional[Dict[str, Any]] = Field(None, description="Scenario document (same JSON as --scenario files)")
    seed: int = Field(default=0, ge=0, le=2**64 - 1, description="Seed for randomized checks")
    max_pivots: Optional[int] = Field(None, ge=1, description="Pivot cap per LP")
    truncation: Optional[int] = Field(None, ge=1, description="Single truncation level N for bubble-demo")


class ScenarioResponse(BaseModel):
    command: str
    exit_code: int
    report: Dict[str, Any]


class ScenarioHandler:
    """Runs registry commands under request-scoped settings"""

    def run(self, command: str, request: ScenarioRequest) -> ScenarioResponse:
        settings = get_settings().with_overrides(max_pivots=request.max_pivots)
        with settings_scope(settings):
            scenario = None
            if request.scenario is not None:
                scenario = resolve_scenario(scenario_from_dict(request.scenario, "body.scenario"))
            report = execute(command, scenario, RunOptions(seed=request.seed, truncation=request.truncation))
        return ScenarioResponse(command=command, exit_code=report.exit_code, report=report.model_dump())

    async def run_command(self, command: str, request: ScenarioRequest) -> ScenarioResponse:
        if command not in COMMANDS:
            raise HTTPException(status_code=404, detail=f"unknown command '{command}'")
        try:
            return await run_in_threadpool(self.run, command, request)
        except ValueError as e:
            # Scenario or input problem
            raise HTTPException(status_code=400, detail=str(e))
        except Exception as e:
            logger.error(f"Scenario command error: {e}")
            raise HTTPException(status_code=500, detail=str(e))


# Handler will be initialized on first use
_handler = None


def get_handler():
    """Get or create handler instance"""
    global _handler
    if _handler is None:
        _handler = ScenarioHandler()
    return _handler


@router.get("/scenarios/commands")
async def list_commands() -> Dict[str, Any]:
    """Available commands and whether they need a scenario"""
    return {
        "object": "list",
        "data": [
            {"name": c.name, "help": c.help, "needs_scenario": c.needs_scenario}
            for c in sorted(COMMANDS.values(), key=lambda c: c.name)
        ],
    }


@router.post("/scenarios/{command}")
async def run_scenario_command(command: str, request: ScenarioRequest) -> ScenarioResponse:
    """Run one command; verdict failures return 200 with exit_code 2"""
    return await get_handler().run_command(command, request)
