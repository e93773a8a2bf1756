"""
Code version string for run manifests
"""
from pathlib import Path
from typing import Optional

import git

from app import __version__
from app.core.logging import logger


def code_version(path: Optional[str] = None) -> str:
    """
    Current commit of the repository holding ``path``, with a ``-dirty``
    suffix for a modified worktree; the package version outside a repository

    Args:
        path: Any path inside the repository; defaults to this package
    """
    search_from = path or str(Path(__file__).resolve().parent)
    try:
        repo = git.Repo(search_from, search_parent_directories=True)
        commit = repo.head.commit.hexsha
        return f"{commit}-dirty" if repo.is_dirty(untracked_files=False) else commit
    except (git.InvalidGitRepositoryError, git.NoSuchPathError, ValueError) as e:
        logger.debug(f"No git commit available ({e}); using package version")
        return f"v{__version__}"
