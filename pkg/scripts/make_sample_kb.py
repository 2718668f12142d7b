"""Regenerate the bundled sample knowledge base (20 Chinese Python QA entries)."""

import json
from pathlib import Path

ENTRIES = [
    {
        "id": "q001",
        "question": "什么是列表？如何创建一个列表？",
        "knowledge_point": "数据结构",
        "answer": (
            "列表(list)是Python中最常用的有序可变容器，可以存放任意类型的元素。\n\n"
            "创建列表有两种常见方式：使用方括号字面量，或使用list()构造函数。\n\n"
            "```python\nnums = [1, 2, 3]\nempty = list()\nmixed = [1, \"two\", 3.0]\nprint(nums, empty, mixed)\n```\n\n"
            "小结：列表是有序、可变、允许重复元素的序列类型，是学习Python数据结构的起点。"
        ),
    },
    {
        "id": "q002",
        "question": "如何同时遍历字典的键和值？",
        "knowledge_point": "数据结构",
        "answer": (
            "字典(dict)保存键值对，遍历时推荐使用items()方法同时取出键和值。\n\n"
            "```python\nscores = {\"语文\": 90, \"数学\": 95}\nfor subject, score in scores.items():\n    print(subject, score)\n```\n\n"
            "如果只需要键，直接遍历字典即可；只需要值时使用values()。\n\n"
            "小结：items()返回可迭代的(键, 值)元组，是最清晰的双遍历写法。"
        ),
    },
    {
        "id": "q003",
        "question": "元组和列表有什么区别？什么时候应该用元组？",
        "knowledge_point": "数据结构",
        "answer": (
            "元组(tuple)与列表最大的区别是不可变性：元组创建后不能增删改元素，而列表可以。\n\n"
            "因为不可变，元组可以作为字典的键或集合的元素，而列表不行；元组也常用来表示结构固定的数据，例如坐标(x, y)。\n\n"
            "当数据在整个生命周期内不应被修改、或需要作为键使用时，应选择元组；需要频繁增删元素时选择列表。"
        ),
    },
    {
        "id": "q004",
        "question": "什么是列表推导式？它比普通循环好在哪里？",
        "knowledge_point": "数据结构",
        "answer": (
            "列表推导式(list comprehension)是用一行表达式从可迭代对象构造新列表的语法。\n\n"
            "```python\nsquares = [x * x for x in range(5)]\nevens = [x for x in range(10) if x % 2 == 0]\nprint(squares, evens)\n```\n\n"
            "相比等价的for循环，推导式更短、意图更明确，并且通常略快，因为迭代在解释器内部完成。\n\n"
            "小结：当转换逻辑简单时优先使用推导式；逻辑复杂时仍然应使用普通循环保持可读性。"
        ),
    },
    {
        "id": "q005",
        "question": "如何定义一个函数？参数和返回值怎么写？",
        "knowledge_point": "函数",
        "answer": (
            "使用def关键字定义函数，括号内声明参数，return语句返回结果。\n\n"
            "```python\ndef add(a, b):\n    \"\"\"返回两个数的和\"\"\"\n    return a + b\n\nresult = add(3, 5)\nprint(result)\n```\n\n"
            "没有return语句的函数返回None。函数名应当使用小写字母加下划线的风格。\n\n"
            "小结：def定义、参数传入、return返回，是函数三要素。"
        ),
    },
    {
        "id": "q006",
        "question": "什么是默认参数？使用默认参数要注意什么？",
        "knowledge_point": "函数",
        "answer": (
            "默认参数让调用者可以省略某些实参，定义时用\"参数=默认值\"的形式。\n\n"
            "```python\ndef greet(name, greeting=\"你好\"):\n    return f\"{greeting}, {name}!\"\n\nprint(greet(\"小明\"))\nprint(greet(\"小红\", greeting=\"早上好\"))\n```\n\n"
            "注意：默认值只在函数定义时求值一次，所以不要用列表、字典等可变对象作默认值，否则多次调用会共享同一个对象。需要可变默认值时，用None占位并在函数体内创建。"
        ),
    },
    {
        "id": "q007",
        "question": "lambda表达式是什么？适合在什么场景使用？",
        "knowledge_point": "函数",
        "answer": (
            "lambda表达式用于创建匿名的小函数，语法是\"lambda 参数: 表达式\"，表达式的值就是返回值。\n\n"
            "它适合作为一次性的简短回调传给sorted、map、filter等高阶函数，例如按长度排序时写key=lambda s: len(s)。\n\n"
            "lambda只能容纳单个表达式，不能包含语句；当逻辑超过一行或需要复用时，应当定义普通函数并起一个有意义的名字。"
        ),
    },
    {
        "id": "q008",
        "question": "除数可能为零时应该怎么处理？",
        "knowledge_point": "异常处理",
        "answer": (
            "除零会触发ZeroDivisionError，正确做法是用try-except捕获或提前判断。\n\n"
            "```python\ndef safe_div(a, b):\n    try:\n        return a / b\n    except ZeroDivisionError:\n        return None\n\nprint(safe_div(10, 2))\nprint(safe_div(1, 0))\n```\n\n"
            "小结：对可预见的异常使用精确的异常类型捕获，不要裸写except，以免掩盖其他错误。"
        ),
    },
    {
        "id": "q009",
        "question": "try-except-else-finally的执行顺序是怎样的？",
        "knowledge_point": "异常处理",
        "answer": (
            "执行顺序是：先执行try块；若抛出异常则按顺序匹配except子句并执行第一个匹配的；若没有异常则执行else块；无论是否发生异常，finally块最后一定执行。\n\n"
            "```python\ntry:\n    value = int(\"42\")\nexcept ValueError:\n    print(\"转换失败\")\nelse:\n    print(\"转换成功\", value)\nfinally:\n    print(\"清理完成\")\n```\n\n"
            "小结：else放只在无异常时才应执行的代码，finally放资源清理代码。"
        ),
    },
    {
        "id": "q010",
        "question": "如何读取一个文本文件的全部内容？",
        "knowledge_point": "文件操作",
        "answer": (
            "推荐使用with语句打开文件并调用read()，with会在代码块结束时自动关闭文件。\n\n"
            "```python\nwith open(\"notes.txt\", \"w\", encoding=\"utf-8\") as f:\n    f.write(\"第一行\\n第二行\\n\")\n\nwith open(\"notes.txt\", encoding=\"utf-8\") as f:\n    content = f.read()\nprint(content)\n```\n\n"
            "处理中文文件时务必显式指定encoding=\"utf-8\"，避免不同平台默认编码不一致。"
        ),
    },
    {
        "id": "q011",
        "question": "with语句有什么作用？为什么推荐用它打开文件？",
        "knowledge_point": "文件操作",
        "answer": (
            "with语句实现了上下文管理协议：进入代码块时获取资源，离开时无论是否发生异常都自动释放资源。\n\n"
            "用with打开文件时，即使代码块中途抛出异常，文件也会被正确关闭，省去了手写try-finally和close()的样板代码。\n\n"
            "小结：凡是涉及需要成对的\"获取/释放\"操作（文件、锁、网络连接），都应优先使用with。"
        ),
    },
    {
        "id": "q012",
        "question": "什么是类和对象？如何定义一个简单的类？",
        "knowledge_point": "面向对象",
        "answer": (
            "类(class)是对一类事物的抽象描述，对象(object)是类的具体实例。类定义属性和方法，对象持有具体的数据。\n\n"
            "```python\nclass Student:\n    def __init__(self, name, score):\n        self.name = name\n        self.score = score\n\n    def introduce(self):\n        return f\"我是{self.name}，成绩{self.score}分\"\n\ns = Student(\"小明\", 92)\nprint(s.introduce())\n```\n\n"
            "小结：class定义类，调用类名()创建实例，self指向当前对象。"
        ),
    },
    {
        "id": "q013",
        "question": "__init__方法的作用是什么？它是构造函数吗？",
        "knowledge_point": "面向对象",
        "answer": (
            "__init__是初始化方法：对象由__new__创建之后，解释器自动调用__init__为它设置初始属性。\n\n"
            "严格地说它不是构造函数（真正创建对象的是__new__），但日常交流中大家习惯把__init__称为构造函数，因为绝大多数初始化逻辑都写在这里。\n\n"
            "注意__init__不能有return返回值（只能return None），参数表的第一个参数必须是self。"
        ),
    },
    {
        "id": "q014",
        "question": "import和from...import有什么区别？",
        "knowledge_point": "模块与包",
        "answer": (
            "import module导入整个模块，使用时需要写模块名前缀，如math.sqrt(4)；from module import name只把指定名字导入当前命名空间，可直接写sqrt(4)。\n\n"
            "import保留了命名空间，能避免名字冲突，来源清晰；from...import书写更简洁，但大量使用时容易污染命名空间，也不利于阅读者判断名字来源。\n\n"
            "建议：默认用import，仅当名字很长或使用非常频繁时用from...import，绝不使用from module import *。"
        ),
    },
    {
        "id": "q015",
        "question": "什么是切片？负数索引怎么用？",
        "knowledge_point": "数据结构",
        "answer": (
            "切片(slice)按\"序列[起点:终点:步长]\"的形式截取子序列，区间左闭右开。负数索引从末尾开始计数，-1表示最后一个元素。\n\n"
            "```python\nletters = [\"a\", \"b\", \"c\", \"d\", \"e\"]\nprint(letters[1:3])\nprint(letters[-2:])\nprint(letters[::-1])\n```\n\n"
            "小结：切片不会修改原序列而是返回新序列；步长为-1可实现反转。"
        ),
    },
    {
        "id": "q016",
        "question": "如何格式化字符串？f-string怎么用？",
        "knowledge_point": "字符串处理",
        "answer": (
            "f-string是最推荐的字符串格式化方式：在字符串前加f，用花括号嵌入表达式。\n\n"
            "```python\nname = \"小红\"\nscore = 95.5\nprint(f\"{name}的成绩是{score:.1f}分\")\nprint(f\"{2 + 3 = }\")\n```\n\n"
            "花括号内可以写任意表达式，冒号后是格式说明符（如.1f保留一位小数）。相比%格式化和str.format()，f-string更直观也更快。"
        ),
    },
    {
        "id": "q017",
        "question": "while循环和for循环有什么区别？分别适合什么场景？",
        "knowledge_point": "控制流程",
        "answer": (
            "for循环用于遍历已知的可迭代对象（列表、字符串、range等），迭代次数由对象长度决定；while循环在条件为真时反复执行，迭代次数事先未知。\n\n"
            "遍历集合、执行固定次数时用for；等待某个条件变化（如用户输入合法、数值收敛）时用while。\n\n"
            "使用while要特别注意在循环体内更新条件变量，否则会造成死循环。"
        ),
    },
    {
        "id": "q018",
        "question": "什么是递归？请用阶乘举一个例子。",
        "knowledge_point": "算法",
        "answer": (
            "递归是函数直接或间接调用自身的技巧，由基准情形(base case)终止，由递推关系缩小问题规模。\n\n"
            "```python\ndef factorial(n):\n    if n <= 1:\n        return 1\n    return n * factorial(n - 1)\n\nprint(factorial(5))\n```\n\n"
            "写递归先写基准情形，再保证每次调用都向基准情形靠近。Python默认递归深度约1000层，过深会抛出RecursionError，必要时改用循环。"
        ),
    },
    {
        "id": "q019",
        "question": "sort()和sorted()有什么区别？如何按自定义规则排序？",
        "knowledge_point": "数据结构",
        "answer": (
            "list.sort()就地排序并返回None，只适用于列表；sorted()接受任意可迭代对象，返回新列表，原数据不变。\n\n"
            "```python\nwords = [\"banana\", \"fig\", \"apple\"]\nprint(sorted(words, key=len))\nwords.sort(reverse=True)\nprint(words)\n```\n\n"
            "自定义规则通过key参数传入一个函数，按它的返回值比较元素；reverse=True表示降序。\n\n"
            "小结：需要保留原列表时用sorted()，允许原地修改时用sort()。"
        ),
    },
    {
        "id": "q020",
        "question": "什么是变量作用域？global关键字什么时候需要用？",
        "knowledge_point": "基础语法",
        "answer": (
            "Python按LEGB规则查找名字：局部(Local)、闭包(Enclosing)、全局(Global)、内置(Builtins)。函数内赋值的变量默认是局部变量。\n\n"
            "当需要在函数内部给模块级变量重新赋值时，必须先用global声明，否则Python会创建同名的局部变量；只是读取全局变量则不需要global。\n\n"
            "实践中应尽量少用global，通过参数传入、返回值传出数据会让函数更易测试。"
        ),
    },
]


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "src" / "molly" / "data" / "sample_kb.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as handle:
        for entry in ENTRIES:
            handle.write(json.dumps(entry, ensure_ascii=False) + "\n")
    print(f"wrote {len(ENTRIES)} entries -> {out}")


if __name__ == "__main__":
    main()
