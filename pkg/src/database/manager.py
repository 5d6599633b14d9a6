"""
Cache manager: loads the persisted cache into a correlator service and
writes it back out.
"""
import logging
from typing import Optional

from ..services import constants
from ..services.constants import AlphaTable, install_alpha_table
from ..services.correlator import CorrelatorService, correlator_service
from ..utils.errors import CacheCorruptionError
from .cache_file import CacheRepository

logger = logging.getLogger(__name__)


class CacheManager:
    """Central cache lifecycle manager."""

    def __init__(self, path: Optional[str] = None, service: Optional[CorrelatorService] = None):
        self.service = service or correlator_service
        self.repository: Optional[CacheRepository] = CacheRepository(path) if path else None
        self.alpha: Optional[AlphaTable] = None

    async def initialize(self):
        """Seed the kmz_dvv cache and the alpha table from disk."""
        if not self.repository:
            logger.debug("No cache path configured; caches stay in memory")
            return
        try:
            values = await self.repository.load()
            self.service.seed(values.items())

            alpha_values = await self.repository.load_alpha()
            if alpha_values:
                table = AlphaTable(values=alpha_values)
                bad = [m for m in table.values if m and table.relation_residual(m) != 0]
                if bad:
                    raise CacheCorruptionError(
                        f"{self.repository.alpha_path}: {len(bad)} alpha values violate their defining relation"
                    )
                self.alpha = install_alpha_table(table)
            logger.info("Cache initialized successfully")
        except CacheCorruptionError as e:
            logger.error(f"Failed to load cache: {e}")
            raise

    async def save(self):
        if not self.repository:
            return
        await self.repository.save(self.service.known_values())
        table = constants.alpha_table(0)
        if table.max_weight > 0:
            await self.repository.save_alpha(table.to_lines())

    async def cleanup(self):
        """Persist and report cache statistics."""
        try:
            await self.save()
        except OSError as e:
            logger.error(f"Error while saving cache: {e}")
        for line in self.service.stats():
            logger.info(line)

    async def close(self):
        """Alias for cleanup method."""
        await self.cleanup()
