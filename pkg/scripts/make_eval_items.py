"""Regenerate the bundled 10-item evaluation fixture (first 10 sample entries)."""

from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "src" / "molly" / "data"


def main() -> None:
    lines = (ROOT / "sample_kb.jsonl").read_text(encoding="utf-8").splitlines()
    out = ROOT / "eval_items.jsonl"
    out.write_text("\n".join(lines[:10]) + "\n", encoding="utf-8")
    print(f"wrote 10 items -> {out}")


if __name__ == "__main__":
    main()
