/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_photonstatistics_free: (a: number, b: number) => void;
export const deviceTable: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const levels: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const photonStatistics: (a: number, b: number, c: number) => [number, number, number];
export const photonstatistics_atomic: (a: number) => [number, number];
export const photonstatistics_atomicMoments: (a: number) => [number, number];
export const photonstatistics_sqc: (a: number) => [number, number];
export const photonstatistics_sqcMoments: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
