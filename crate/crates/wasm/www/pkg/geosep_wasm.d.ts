/* tslint:disable */
/* eslint-disable */

export function chiralCloud(seed: bigint): Float64Array;

export function chiralityGaps(seed: bigint, angle: number): Float64Array;

export function choleskyDistances(half: number, second: boolean): Float64Array;

export function choleskyGaps(half: number, seed: bigint): Float64Array;

export function noiseCurve(half: number, seed: bigint, sigmas: Float64Array): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly chiralCloud: (a: bigint) => [number, number];
    readonly chiralityGaps: (a: bigint, b: number) => [number, number, number, number];
    readonly choleskyDistances: (a: number, b: number) => [number, number, number, number];
    readonly choleskyGaps: (a: number, b: bigint) => [number, number, number, number];
    readonly noiseCurve: (a: number, b: bigint, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
