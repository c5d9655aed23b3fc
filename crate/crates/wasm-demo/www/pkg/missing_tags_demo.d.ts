/* tslint:disable */
/* eslint-disable */

/**
 * Rows of `[R, REGM mean p, Schnabel mean p, REGM mean N, Schnabel mean N,
 * mean distinct read]` for `R = 2..=r_max`.
 */
export function estimatorMeans(n_tags: number, p: number, rho: number, r_max: number, trials: number, seed: number): Float64Array;

/**
 * Rows of `[R, true p_M, estimated p_M (REGM), tags still unread]` for one
 * simulated inventory of `r_max` sessions.
 */
export function missingCurve(n_tags: number, p: number, rho: number, r_max: number, seed: number): Float64Array;

/**
 * `[median stop R, mean stop R, miss rate, cap rate]` followed by the count
 * of trials stopping at each `R = 0..=max_sessions`.
 */
export function stopSummary(n_tags: number, p: number, rho: number, threshold: number, margin: number, max_sessions: number, trials: number, seed: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly estimatorMeans: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly missingCurve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly stopSummary: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
