/* tslint:disable */
/* eslint-disable */

/**
 * Source value that cancels the leading singularity: `f2` for the radial
 * family, `f1` for the square family, the other two parameters fixed.
 */
export function cancellation_root(name: string, c: number, other: number): number;

/**
 * Jump of the data across the horizontal direction along the bottom edge
 * line of the square phantom, from `x0` to `x1`, as `[xs.., jumps..]`.
 */
export function edge_profile(c: number, f1: number, f2: number, x0: number, x1: number, n: number): Float64Array;

/**
 * Transform about `(x, y)` for `n` angles in `[lo, hi]`, returned as
 * `[omegas.., values.., d_omega..]`.
 */
export function sweep(name: string, c: number, f1: number, f2: number, x: number, y: number, lo: number, hi: number, n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly cancellation_root: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly edge_profile: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
