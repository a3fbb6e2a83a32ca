import { contextJson } from "./contexts";
import { isOnScale } from "./scale";
import type {
  ContextSpec,
  EvaluateResponse,
  JudgmentJson,
  QuestionnairePayload,
} from "./types";

export class JudgmentError extends Error {}

interface ContextState {
  judgments: Map<string, number>;
  // Latest server evaluation; null whenever a judgment changed after it was
  // fetched, so a stale consistency ratio is never shown.
  evaluation: EvaluateResponse | null;
}

export interface SessionSnapshot {
  expert_id: string;
  judgments: Record<string, JudgmentJson[]>;
}

const key = (row: number, col: number) => `${row}:${col}`;

/**
 * One expert's in-progress questionnaire: the ordered contexts, the
 * judgments entered so far, and the latest consistency evaluation per
 * context. All consistency numbers come from the server; this class only
 * stores them.
 */
export class ElicitationSession {
  readonly expertId: string;
  readonly contexts: ContextSpec[];
  private readonly state = new Map<string, ContextState>();

  constructor(expertId: string, contexts: ContextSpec[]) {
    if (!expertId.trim()) {
      throw new JudgmentError("expert id must be non-empty");
    }
    this.expertId = expertId.trim();
    this.contexts = contexts;
    for (const ctx of contexts) {
      this.state.set(ctx.key, { judgments: new Map(), evaluation: null });
    }
  }

  context(keyOrSpec: string | ContextSpec): ContextSpec {
    const k = typeof keyOrSpec === "string" ? keyOrSpec : keyOrSpec.key;
    const found = this.contexts.find((c) => c.key === k);
    if (!found) throw new JudgmentError(`unknown context: ${k}`);
    return found;
  }

  private stateFor(contextKey: string): ContextState {
    const s = this.state.get(contextKey);
    if (!s) throw new JudgmentError(`unknown context: ${contextKey}`);
    return s;
  }

  /**
   * Record one upper-triangle judgment. Rejects bad coordinates and
   * off-scale values without touching existing state; invalidates the
   * context's evaluation so the UI refetches the consistency ratio.
   */
  enterJudgment(contextKey: string, row: number, col: number, value: number): void {
    const ctx = this.context(contextKey);
    const s = this.stateFor(contextKey);
    const n = ctx.items.length;
    if (!Number.isInteger(row) || !Number.isInteger(col) ||
        row < 0 || col >= n || row >= col) {
      throw new JudgmentError(`(${row}, ${col}) is not an upper-triangle cell of ${n} items`);
    }
    if (!isOnScale(value)) {
      throw new JudgmentError(`judgment must be between 1/9 and 9, got ${value}`);
    }
    s.judgments.set(key(row, col), value);
    s.evaluation = null;
  }

  judgment(contextKey: string, row: number, col: number): number | undefined {
    return this.stateFor(contextKey).judgments.get(key(row, col));
  }

  judgments(contextKey: string): JudgmentJson[] {
    const ctx = this.context(contextKey);
    const s = this.stateFor(contextKey);
    const out: JudgmentJson[] = [];
    for (let row = 0; row < ctx.items.length; row++) {
      for (let col = row + 1; col < ctx.items.length; col++) {
        const value = s.judgments.get(key(row, col));
        if (value !== undefined) out.push({ row, col, value });
      }
    }
    return out;
  }

  missingPairs(contextKey: string): Array<[number, number]> {
    const ctx = this.context(contextKey);
    const s = this.stateFor(contextKey);
    const missing: Array<[number, number]> = [];
    for (let row = 0; row < ctx.items.length; row++) {
      for (let col = row + 1; col < ctx.items.length; col++) {
        if (!s.judgments.has(key(row, col))) missing.push([row, col]);
      }
    }
    return missing;
  }

  isComplete(contextKey: string): boolean {
    return this.missingPairs(contextKey).length === 0;
  }

  /** Contexts still blocking export, in questionnaire order. */
  incompleteContexts(): ContextSpec[] {
    return this.contexts.filter((c) => !this.isComplete(c.key));
  }

  applyEvaluation(contextKey: string, response: EvaluateResponse): void {
    this.stateFor(contextKey).evaluation = response;
  }

  /** Latest server evaluation, or null when judgments changed since. */
  evaluation(contextKey: string): EvaluateResponse | null {
    return this.stateFor(contextKey).evaluation;
  }

  /**
   * Revision hint for an inconsistent context: the item triple whose
   * judgments disagree the most (largest |log a_ij + log a_jk - log a_ik|).
   */
  worstTriad(contextKey: string): [string, string, string] | null {
    const ctx = this.context(contextKey);
    if (!this.isComplete(contextKey) || ctx.items.length < 3) return null;
    const s = this.stateFor(contextKey);
    const a = (i: number, j: number): number => {
      if (i === j) return 1;
      if (i < j) return s.judgments.get(key(i, j))!;
      return 1 / s.judgments.get(key(j, i))!;
    };
    let worst: [number, number, number] | null = null;
    let worstGap = -1;
    const n = ctx.items.length;
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        for (let k = j + 1; k < n; k++) {
          const gap = Math.abs(Math.log(a(i, j)) + Math.log(a(j, k)) - Math.log(a(i, k)));
          if (gap > worstGap) {
            worstGap = gap;
            worst = [i, j, k];
          }
        }
      }
    }
    if (!worst) return null;
    return [ctx.items[worst[0]]!, ctx.items[worst[1]]!, ctx.items[worst[2]]!];
  }

  /** Export payload in the service's questionnaire schema. Throws if any context is incomplete. */
  toQuestionnaire(): QuestionnairePayload {
    const gaps = this.incompleteContexts();
    if (gaps.length > 0) {
      throw new JudgmentError(
        `incomplete contexts: ${gaps.map((c) => c.key).join(", ")}`,
      );
    }
    return {
      expert_id: this.expertId,
      matrices: this.contexts.map((ctx) => ({
        context: contextJson(ctx),
        items: [...ctx.items],
        judgments: this.judgments(ctx.key),
      })),
    };
  }

  // --- persistence ------------------------------------------------------

  snapshot(): SessionSnapshot {
    const judgments: Record<string, JudgmentJson[]> = {};
    for (const ctx of this.contexts) {
      const entered = this.judgments(ctx.key);
      if (entered.length > 0) judgments[ctx.key] = entered;
    }
    return { expert_id: this.expertId, judgments };
  }

  static restore(snapshot: SessionSnapshot, contexts: ContextSpec[]): ElicitationSession {
    const session = new ElicitationSession(snapshot.expert_id, contexts);
    for (const [contextKey, entries] of Object.entries(snapshot.judgments)) {
      if (!contexts.some((c) => c.key === contextKey)) continue; // dropped context
      for (const j of entries) {
        session.enterJudgment(contextKey, j.row, j.col, j.value);
      }
    }
    return session;
  }
}
