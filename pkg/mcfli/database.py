from sqlalchemy import create_engine
from sqlalchemy.orm import declarative_base, sessionmaker
from mcfli.config import DATABASE_URL

# Create database engine for the sweep ledger
# SQLite needs cross-thread access; other backends take their URL defaults
connect_args = {"check_same_thread": False} if DATABASE_URL.startswith("sqlite") else {}
engine = create_engine(DATABASE_URL, connect_args=connect_args)

# Create session factory
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

# Create base class for ledger models
Base = declarative_base()
