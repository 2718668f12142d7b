// All user-facing chrome strings live here so the interface can switch
// languages without touching rendering code.

export type Lang = "zh" | "en";

const STRINGS: Record<Lang, Record<string, string>> = {
  zh: {
    title: "Python 学习助手",
    inputPlaceholder: "输入你的 Python 问题…",
    send: "提问",
    perceptionPanel: "意图分析",
    teacherAnalysis: "教师分析",
    studentVerdict: "学生评估",
    summary: "要点摘要",
    addressesYes: "可以解决问题",
    addressesNo: "未能解决问题",
    retrievalPanel: "知识库检索",
    similarity: "相似度",
    draftPanel: "答案草稿",
    draftIteration: "第 {n} 版",
    reflectionPanel: "自我审查",
    rationality: "内容合理性",
    codeCorrectness: "代码正确性",
    usefulness: "答案有用性",
    passLabel: "通过",
    failLabel: "未通过",
    instructions: "修改指示",
    finalPanel: "最终回答",
    abortedBadge: "会话中断",
    errorBanner: "连接失败，请重试。",
    retry: "重试",
    copyCode: "复制代码",
    copied: "已复制",
    replay: "回放会话",
    rounds: "轮次",
  },
  en: {
    title: "Python Learning Assistant",
    inputPlaceholder: "Ask a Python question…",
    send: "Ask",
    perceptionPanel: "Intent analysis",
    teacherAnalysis: "Teacher analysis",
    studentVerdict: "Student verdict",
    summary: "Summary",
    addressesYes: "addresses the question",
    addressesNo: "does not address the question",
    retrievalPanel: "Knowledge retrieval",
    similarity: "similarity",
    draftPanel: "Draft answers",
    draftIteration: "Draft {n}",
    reflectionPanel: "Self-review",
    rationality: "Rationality",
    codeCorrectness: "Code correctness",
    usefulness: "Usefulness",
    passLabel: "PASS",
    failLabel: "FAIL",
    instructions: "Revision instructions",
    finalPanel: "Final answer",
    abortedBadge: "session aborted",
    errorBanner: "Connection failed. Please retry.",
    retry: "Retry",
    copyCode: "Copy code",
    copied: "Copied",
    replay: "Replay session",
    rounds: "rounds",
  },
};

let current: Lang = "zh";

export function setLang(lang: Lang): void {
  current = lang;
}

export function t(key: string, vars?: Record<string, string | number>): string {
  let text = STRINGS[current][key] ?? STRINGS.en[key] ?? key;
  if (vars) {
    for (const [name, value] of Object.entries(vars)) {
      text = text.replace(`{${name}}`, String(value));
    }
  }
  return text;
}
