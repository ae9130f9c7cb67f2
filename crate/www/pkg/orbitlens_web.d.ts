/* tslint:disable */
/* eslint-disable */

/**
 * Sectorial Abel solution at `z` as `[re, im, residual]`.
 */
export function abel(germ: string, rhs: string, z: string, side: string): Float64Array;

/**
 * Classification of a complex germ from one orbit, as JSON.
 */
export function classify(germ: string, z0: string, points: number): string;

/**
 * Cyclicity candidates `[k, k + 1]` for a spiral of dimension `dim`.
 */
export function cyclicity(dim: number): Uint32Array;

/**
 * Orbit points flattened as `[re0, im0, re1, im1, ...]`.
 */
export function orbit_points(germ: string, z0: string, points: number): Float64Array;

/**
 * Box dimension of a spiral around a saddle loop of codimension `codim`.
 */
export function saddle_dimension(codim: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly abel: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly classify: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly cyclicity: (a: number) => [number, number, number, number];
    readonly orbit_points: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly saddle_dimension: (a: number) => [number, number, number];
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
