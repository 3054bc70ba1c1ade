/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const chiralCloud: (a: bigint) => [number, number];
export const chiralityGaps: (a: bigint, b: number) => [number, number, number, number];
export const choleskyDistances: (a: number, b: number) => [number, number, number, number];
export const choleskyGaps: (a: number, b: bigint) => [number, number, number, number];
export const noiseCurve: (a: number, b: bigint, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
