/* tslint:disable */
/* eslint-disable */

export class PhotonStatistics {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly atomicMoments: Float64Array;
    readonly atomic: Float64Array;
    /**
     * `[mean, variance, fano]` under regular pumping.
     */
    readonly sqcMoments: Float64Array;
    readonly sqc: Float64Array;
}

export function deviceTable(gap_over_ej: number, t01: number, n_t: number, tau_over_pi: number): string;

/**
 * Flattened rows of `f, E0..E3, t01, t02, t12`; see [`demo::level_rows`].
 */
export function levels(f_s: number, f_start: number, f_stop: number, step: number, n_p: number, n_q: number): Float64Array;

export function photonStatistics(n_th: number, n_t: number, tau_over_pi: number): PhotonStatistics;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_photonstatistics_free: (a: number, b: number) => void;
    readonly deviceTable: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly levels: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly photonStatistics: (a: number, b: number, c: number) => [number, number, number];
    readonly photonstatistics_atomic: (a: number) => [number, number];
    readonly photonstatistics_atomicMoments: (a: number) => [number, number];
    readonly photonstatistics_sqc: (a: number) => [number, number];
    readonly photonstatistics_sqcMoments: (a: number) => [number, number];
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
