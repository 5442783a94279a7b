/* tslint:disable */
/* eslint-disable */

/**
 * `[u12, v12, u21, v21, total]`
 */
export function breakdown(mu1: number, mu2: number, sd1: number, sd2: number, rho: number): Float64Array;

export function evpi_heatmap(extent: number, steps: number, sd1: number, sd2: number, rho: number): Float64Array;

/**
 * `[wtps..., closed..., bootstrap...]`, each of equal length.
 */
export function preset_curves(wtp_max: number, wtp_step: number, boot_b: number, trial_seed: number, boot_seed: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly breakdown: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly evpi_heatmap: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly preset_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
