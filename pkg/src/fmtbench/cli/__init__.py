# CLI package - optional install: pip install "fmtbench[cli]"
