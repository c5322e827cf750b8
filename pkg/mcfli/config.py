from pathlib import Path
from dotenv import load_dotenv
import os

# Load environment variables from .env file
load_dotenv()

# Sweep ledger database
# Default to SQLite, but support any SQLAlchemy URL if DATABASE_URL is set
DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///./data/mcfli.db")

# Ensure data directory exists for file-backed SQLite
if DATABASE_URL.startswith("sqlite") and ":memory:" not in DATABASE_URL:
    data_dir = Path("data")
    data_dir.mkdir(exist_ok=True)

# Experiment defaults, overridden by CLI flags and --config files
MASTER_SEED = int(os.getenv("MCFLI_SEED", "20240607"))
THREADS = int(os.getenv("MCFLI_THREADS", "1"))
TRIALS = int(os.getenv("MCFLI_TRIALS", "80"))
SUCCESS_DB = float(os.getenv("MCFLI_SUCCESS_DB", "40.0"))
OUTPUT_DIR = Path(os.getenv("MCFLI_OUTPUT_DIR", "./results"))
LOG_LEVEL = os.getenv("MCFLI_LOG_LEVEL", "INFO")

# Solver defaults
MAX_ITERATIONS = int(os.getenv("MCFLI_MAX_ITERATIONS", "20000"))
TOLERANCE = float(os.getenv("MCFLI_TOLERANCE", "1e-8"))

# Sentinel reported for exact reconstructions
SNR_CAP_DB = 300.0

LOG_FORMAT = "%(asctime)s [%(levelname)8s] %(message)s (%(filename)s:%(lineno)s)"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
