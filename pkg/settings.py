import os

from dotenv import load_dotenv

load_dotenv()

DEV_MODE: bool = os.getenv("DEV_MODE", "False").lower() in ("true", "1", "t")

if DEV_MODE:
    load_dotenv(".env.dev", override=True)

DQG_SEED: int = int(os.getenv("DQG_SEED", "20240607"))

DQG_TOL: float = float(os.getenv("DQG_TOL", "1e-9"))

DQG_SAMPLES: int = int(os.getenv("DQG_SAMPLES", "8"))

DQG_WINDOW_GROW: int = int(os.getenv("DQG_WINDOW_GROW", "0"))

DQG_FORMAT: str = os.getenv("DQG_FORMAT", "text")

if DQG_FORMAT not in ("text", "machine"):
    DQG_FORMAT = "text"
