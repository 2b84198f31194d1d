"""Runtime configuration"""
import os

from dotenv import load_dotenv

load_dotenv()

# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Parallel feature extraction / image loading
MAX_WORKERS = int(os.getenv("MAX_WORKERS", "4"))

# Default root for generated datasets
DATA_DIR = os.getenv("DATA_DIR", "./data")
