from contextlib import contextmanager

from mcfli.database import SessionLocal


def get_db():
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


# CLI commands use the generator as a context manager
db_session = contextmanager(get_db)
