"""Regenerate the bundled scripted-response playbooks."""

import json
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "molly" / "data" / "playbooks"

TEACHER = (
    "这个问题涉及的知识点：列表的定义、可变序列的特性、切片与索引。"
    "可以从容器类型的共性切入，再对比列表与元组的差异。"
)
STUDENT_YES = (
    "ADDRESSES: YES\n"
    "CRITIQUE: 思路完整，覆盖了提问者需要的概念。\n"
    "SUMMARY: 要点：列表是有序可变序列；支持索引与切片；与元组的区别在于可变性。"
)
STUDENT_NO = (
    "ADDRESSES: NO\n"
    "CRITIQUE: 没有提到创建列表的具体语法，学习者需要可运行的示例。"
)
DRAFT_0 = (
    "列表是Python的有序可变容器。创建方式：\n\n"
    "```python\nnums = [1, 2, 3]\nprint(nums)\n```\n\n"
    "列表支持索引、切片和原地修改。"
)
DRAFT_1 = (
    "列表(list)是Python的有序可变容器，可存放任意类型元素。创建方式：\n\n"
    "```python\nnums = [1, 2, 3]\nempty = list()\nprint(nums, empty)\n```\n\n"
    "列表支持索引、切片和原地修改，与元组的区别在于可变性。"
)
DRAFT_2 = (
    "列表(list)是Python的有序可变容器，可存放任意类型元素。\n\n"
    "创建方式有两种：\n\n"
    "```python\nnums = [1, 2, 3]\nempty = list()\nmixed = [1, \"two\", 3.0]\nprint(nums, empty, mixed)\n```\n\n"
    "列表支持索引、切片和原地修改；与元组的区别在于列表可变而元组不可变。"
    "需要保存不应被修改的数据时选择元组。"
)
CRITIC_PASS = (
    "RATIONALITY: PASS - 解释与示例答案一致。\n"
    "CODE: PASS - 代码可以直接运行。\n"
    "USEFULNESS: PASS - 回答了提问者的问题。"
)
CRITIC_FAIL_CODE = (
    "RATIONALITY: PASS - 概念解释正确。\n"
    "CODE: FAIL - 缺少list()构造函数的示例。\n"
    "USEFULNESS: PASS - 基本回答了问题。\n"
    "INSTRUCTIONS: 在代码示例中补充list()构造函数的用法。"
)
CRITIC_FAIL_USE = (
    "RATIONALITY: PASS - 概念解释正确。\n"
    "CODE: PASS - 代码可以运行。\n"
    "USEFULNESS: FAIL - 没有说明列表与元组的使用场景差异。\n"
    "INSTRUCTIONS: 补充一句何时选择列表、何时选择元组。"
)


def write(name: str, records: list[tuple[str, str]]) -> None:
    path = OUT_DIR / name
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for stage_tag, response in records:
            handle.write(
                json.dumps({"stage_tag": stage_tag, "response": response}, ensure_ascii=False)
                + "\n"
            )
    print(f"wrote {len(records):3d} records -> {path}")


def perception_pair() -> list[tuple[str, str]]:
    return [("perception_teacher", TEACHER), ("perception_student", STUDENT_YES)]


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)

    write(
        "all_pass.jsonl",
        perception_pair() + [("generation", DRAFT_0), ("reflection_critic", CRITIC_PASS)],
    )

    write(
        "fail_fail_pass.jsonl",
        perception_pair()
        + [
            ("generation", DRAFT_0),
            ("reflection_critic", CRITIC_FAIL_CODE),
            ("reflection_refiner", DRAFT_1),
            ("reflection_critic", CRITIC_FAIL_USE),
            ("reflection_refiner", DRAFT_2),
            ("reflection_critic", CRITIC_PASS),
        ],
    )

    write(
        "always_fail.jsonl",
        perception_pair()
        + [
            ("generation", DRAFT_0),
            ("reflection_critic", CRITIC_FAIL_CODE),
            ("reflection_refiner", DRAFT_1),
            ("reflection_critic", CRITIC_FAIL_USE),
            ("reflection_refiner", DRAFT_2),
            ("reflection_critic", CRITIC_FAIL_CODE),
            ("reflection_refiner", DRAFT_1),
            ("reflection_critic", CRITIC_FAIL_USE),
        ],
    )

    write(
        "two_round_perception.jsonl",
        [
            ("perception_teacher", TEACHER),
            ("perception_student", STUDENT_NO),
            ("perception_teacher", TEACHER + " 补充：用方括号字面量或list()创建列表。"),
            ("perception_student", STUDENT_YES),
            ("generation", DRAFT_0),
            ("reflection_critic", CRITIC_PASS),
        ],
    )

    # demo playbook for interactive asks; one full pass per ask, the
    # service reloads it for each session
    write(
        "demo.jsonl",
        perception_pair() + [("generation", DRAFT_2), ("reflection_critic", CRITIC_PASS)],
    )

    # scripted flows for a 10-item evaluation run: per item the agent does
    # teacher/student/generation/critic, then the judge scores it
    eval_records: list[tuple[str, str]] = []
    judge_scores = [
        (82, 88, 78),
        (75, 80, 70),
        (90, 92, 85),
        (68, 72, 65),
        (85, 84, 80),
        (79, 83, 75),
        (88, 90, 84),
        (73, 76, 70),
        (81, 85, 77),
        (86, 89, 82),
    ]
    for i in range(10):
        eval_records.append(("perception_teacher", f"知识点分析（第{i + 1}题）：考察基础概念与示例代码。"))
        eval_records.append(
            (
                "perception_student",
                f"ADDRESSES: YES\nSUMMARY: 第{i + 1}题要点：先讲概念，再给可运行示例。",
            )
        )
        eval_records.append(
            (
                "generation",
                f"第{i + 1}题解答：概念说明见下，示例：\n\n```python\nprint({i + 1})\n```\n\n以上代码演示了要点。",
            )
        )
        eval_records.append(("reflection_critic", CRITIC_PASS))
    for ac, ea, uf in judge_scores:
        eval_records.append(("judge", f"AC: {ac}\nEA: {ea}\nUF: {uf}"))
    write("eval_smoke.jsonl", eval_records)


if __name__ == "__main__":
    main()
