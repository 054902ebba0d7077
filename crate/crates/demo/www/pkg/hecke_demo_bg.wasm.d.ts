/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const factor: (a: number, b: number, c: number) => [number, number, number, number];
export const root_grid: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const suggested_max_weight: (a: number, b: number) => number;
export const trace_residues: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
