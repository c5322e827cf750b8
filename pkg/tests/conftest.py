import numpy as np
import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from mcfli.database import Base
from mcfli.core.grid import make_grid
from mcfli.core.layout import fermat_spiral_layout, random_layout_1d
from mcfli.core.sketches import draw_sketches
import mcfli.models  # noqa: F401  registers the ledger tables on Base

# In-memory ledger shared by every connection of the test run
ledger_engine = create_engine("sqlite://", poolclass=StaticPool)
LedgerSession = sessionmaker(autoflush=False, bind=ledger_engine)

@pytest.fixture(scope="session")
def ledger_tables():
    Base.metadata.create_all(bind=ledger_engine)
    yield
    Base.metadata.drop_all(bind=ledger_engine)

@pytest.fixture
def db(ledger_tables):
    # Each test writes inside a transaction that is rolled back afterwards
    connection = ledger_engine.connect()
    transaction = connection.begin()
    session = LedgerSession(bind=connection)
    yield session
    session.close()
    transaction.rollback()
    connection.close()

@pytest.fixture
def rng():
    return np.random.default_rng(1234)

@pytest.fixture(scope="session")
def grid_1d():
    return make_grid(1, 256, 1.0)

@pytest.fixture(scope="session")
def grid_2d():
    return make_grid(2, 32, 1.0)

@pytest.fixture(scope="session")
def layout_1d(grid_1d):
    return random_layout_1d(grid_1d, 8, seed=11)

@pytest.fixture(scope="session")
def layout_2d(grid_2d):
    # Snapped spiral: every visibility on-grid
    return fermat_spiral_layout(grid_2d, 12, snap=True)

@pytest.fixture(scope="session")
def sketches_1d(layout_1d):
    return draw_sketches(layout_1d.Q, 40, seed=5)
