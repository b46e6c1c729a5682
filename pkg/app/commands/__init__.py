import logging
from typing import Optional

from app.models.schemas import RunConfig
from app.services.corpus import Corpus, load_corpus
from app.services.errors import CorpusError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def load_or_report(cfg: RunConfig) -> Optional[Corpus]:
    """Load the corpus; on failure print one `error:` line and return None."""
    try:
        return load_corpus(cfg.corpus_root)
    except (CorpusError, OSError) as e:
        logger.error(f"Failed to load corpus {cfg.corpus_root}: {str(e)}", exc_info=True)
        print(f"error: {e}")
        return None
