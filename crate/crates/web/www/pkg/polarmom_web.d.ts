/* tslint:disable */
/* eslint-disable */

/**
 * Both operators on one built-in scenario; the comparison row as JSON.
 */
export function compare(name: string, tol: number): string;

/**
 * Exact scattered magnitude of a two-layer lossless cylinder in vacuum.
 * Radii are in free-space wavelengths; the circle sits at `1.5·r_outer`.
 */
export function layered_cylinder(frequency: number, eps_inner: number, eps_outer: number, r_inner: number, r_outer: number, samples: number): Float64Array;

/**
 * Names accepted by [`solve`] and [`compare`], comma-separated.
 */
export function scenarios(): string;

/**
 * Solves a built-in scenario with `method` ("polar" or "cartesian") and
 * returns the scattered-field magnitude on the observation circle.
 */
export function solve(name: string, method: string, tol: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly compare: (a: number, b: number, c: number) => [number, number, number, number];
    readonly layered_cylinder: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly scenarios: () => [number, number];
    readonly solve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __externref_table_alloc: () => number;
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
