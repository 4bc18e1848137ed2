"""
Sweep Result Export

CSV through pandas (fixed column order, %.12g floats, empty cells for
missing values) and a JSON document carrying the provenance block. The
CSV body holds no timestamps, so repeated runs give identical bytes.
"""

import json
import logging
from pathlib import Path
from typing import List, Union

import pandas as pd

from ..core.errors import ConfigError
from ..schemas import SweepResult

logger = logging.getLogger(__name__)

CSV_COLUMNS: List[str] = [
    "grid_param", "grid_value", "splitting", "e_before", "e_after", "gain",
    "success_weight", "cutoff", "k", "status",
]
FLOAT_FORMAT = "%.12g"


def to_frame(result: SweepResult) -> pd.DataFrame:
    records = [row.model_dump() for row in result.rows]
    frame = pd.DataFrame.from_records(records, columns=CSV_COLUMNS)
    # nullable ints keep the cutoff column free of ".0"
    frame["cutoff"] = frame["cutoff"].astype("Int64")
    return frame


def csv_text(result: SweepResult) -> str:
    return to_frame(result).to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="",
                                   lineterminator="\n")


def write_csv(result: SweepResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(result), encoding="utf-8")
    logger.info(f"wrote {len(result.rows)} rows to {path}")
    return path


def write_json(result: SweepResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {
        "provenance": result.provenance,
        "rows": [row.model_dump(mode="json") for row in result.rows],
    }
    path.write_text(json.dumps(document, indent=2, sort_keys=False), encoding="utf-8")
    return path


def write_result(result: SweepResult, output: Union[str, Path]) -> List[Path]:
    """
    Write CSV and JSON next to each other.

    `output` names either file; the other one takes the same stem.
    """
    output = Path(output)
    suffix = output.suffix.lower()
    if suffix not in ("", ".csv", ".json"):
        raise ConfigError(f"output must end in .csv or .json, got {output.name}",
                          parameter="output")
    stem = output.with_suffix("")
    return [write_csv(result, stem.with_suffix(".csv")),
            write_json(result, stem.with_suffix(".json"))]


PLOT_SCRIPT = '''"""Plot {csv_name}: {y} against {x}, one line per splitting and k."""

import sys

import matplotlib.pyplot as plt
import pandas as pd

path = sys.argv[1] if len(sys.argv) > 1 else "{csv_name}"
frame = pd.read_csv(path)
frame = frame[frame["status"] == "ok"]

fig, ax = plt.subplots(figsize=(7, 4.5))
for (splitting, k), group in frame.groupby(["splitting", "k"], sort=False):
    ax.plot(group["grid_value"], group["{y}"], marker=".", label=f"{{splitting}}, k={{k:g}}")
ax.set_xlabel("{x}")
ax.set_ylabel("{y}")
ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''


def write_plot_script(result: SweepResult, csv_path: Union[str, Path]) -> Path:
    """Emit `<csv>.plot.py`, a standalone matplotlib script reading the CSV."""
    csv_path = Path(csv_path).with_suffix(".csv")
    x = result.rows[0].grid_param if result.rows else "grid_value"
    y = "e_after" if result.config.family == "r_sweep" else "gain"
    script = csv_path.with_suffix(".plot.py")
    script.write_text(PLOT_SCRIPT.format(csv_name=csv_path.name, x=x, y=y), encoding="utf-8")
    logger.info(f"wrote plot script {script}")
    return script
