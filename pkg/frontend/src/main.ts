import { askStream, fetchTranscript } from "./api.js";
import { t } from "./labels.js";
import { renderTurn } from "./render.js";
import {
  applyEvent,
  beginTurn,
  failTurn,
  newSession,
  transcriptToEvents,
  type SessionState,
} from "./state.js";

const BASE_URL = "";
const state: SessionState = newSession(crypto.randomUUID().replace(/-/g, ""));

const chat = document.getElementById("chat") as HTMLElement;
const input = document.getElementById("question") as HTMLInputElement;
const sendButton = document.getElementById("send") as HTMLButtonElement;
const replayInput = document.getElementById("replay-id") as HTMLInputElement;
const replayButton = document.getElementById("replay") as HTMLButtonElement;
const banner = document.getElementById("banner") as HTMLElement;

function refreshControls(): void {
  sendButton.disabled = state.inFlight || input.value.trim() === "";
  input.disabled = state.inFlight;
}

function repaint(): void {
  chat.innerHTML = state.turns.map(renderTurn).join("\n");
  chat.querySelectorAll("button[data-copy]").forEach((button) => {
    button.addEventListener("click", () => {
      const pre = button.parentElement?.querySelector("pre code");
      if (pre) {
        void navigator.clipboard.writeText(pre.textContent ?? "");
        button.textContent = `✓ ${t("copied")}`;
      }
    });
  });
  chat.scrollTop = chat.scrollHeight;
  refreshControls();
}

function showBanner(message: string): void {
  banner.textContent = `${t("errorBanner")} (${message})`;
  banner.hidden = false;
}

function submit(): void {
  const question = input.value.trim();
  if (!question || state.inFlight) return;
  banner.hidden = true;
  input.value = "";
  beginTurn(state, question);
  repaint();
  void askStream(BASE_URL, state.sessionId, question, {
    onEvent: (event) => {
      applyEvent(state, event); // synchronous: paints on receipt
      repaint();
    },
    onError: (message) => {
      failTurn(state, message);
      showBanner(message);
      repaint();
    },
    onClose: () => {
      if (state.inFlight) {
        failTurn(state, "stream closed early");
        showBanner("stream closed early");
      }
      repaint();
    },
  });
}

function replay(): void {
  const sessionId = replayInput.value.trim();
  if (!sessionId || state.inFlight) return;
  banner.hidden = true;
  void fetchTranscript(BASE_URL, sessionId)
    .then((transcript) => {
      beginTurn(state, transcript.question);
      for (const event of transcriptToEvents(transcript)) {
        applyEvent(state, event);
      }
      repaint();
    })
    .catch((error) => {
      showBanner(String(error));
    });
}

sendButton.addEventListener("click", submit);
input.addEventListener("keydown", (event) => {
  if (event.key === "Enter") submit();
});
input.addEventListener("input", refreshControls);
replayButton.addEventListener("click", replay);
document.title = t("title");
const heading = document.getElementById("title");
if (heading) heading.textContent = t("title");
input.placeholder = t("inputPlaceholder");
sendButton.textContent = t("send");
replayButton.textContent = t("replay");
refreshControls();
