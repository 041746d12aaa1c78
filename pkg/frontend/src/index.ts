/**
 * Bindings for the parityfactor decoder.
 *
 * The decoder is consumed strictly through its external interfaces: the
 * `parityfactor` CLI and its problem/certificate file formats.  Weights and
 * results cross the boundary as exact (numerator, denominator) bigint pairs,
 * never as floats.
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** Exact rational as a (numerator, denominator) pair; denominator > 0. */
export type Rational = [bigint, bigint];

export interface ApiEdge {
  vertices: number[];
  weight: Rational;
}

export interface ApiProblem {
  vertexCount: number;
  edges: ApiEdge[];
}

export interface DecodeOptions {
  /** Per-cluster hyperblossom limit; "inf" or omitted means unbounded. */
  c?: number | "inf";
  /** Ordered relaxer finder names, e.g. ["nullity-le1", "single-hair"]. */
  finders?: string[];
}

export interface DecodeResult {
  pattern: number[];
  primal: Rational;
  dual: Rational;
  gap: Rational;
  certified: boolean;
}

export interface OracleResult {
  pattern: number[];
  weight: Rational;
}

export interface VerifyReport {
  ok: boolean;
  failures: string[];
}

/** Input failed structural validation before reaching the decoder. */
export class ValidationError extends Error {}

/** The syndrome admits no parity factor. */
export class InfeasibleSyndromeError extends Error {}

/** The solution space exceeded the enumeration cap. */
export class OverflowSignalError extends Error {}

/** The decoder CLI failed in an unexpected way. */
export class DecoderProcessError extends Error {}

const PYTHON = process.env.PARITYFACTOR_PYTHON ?? "python3";

function normalizeRational(value: Rational, context: string): Rational {
  let [num, den] = value.map(BigInt) as [bigint, bigint];
  if (den === 0n) {
    throw new ValidationError(`${context}: zero denominator`);
  }
  if (den < 0n) {
    num = -num;
    den = -den;
  }
  return [num, den];
}

function formatRational([num, den]: Rational): string {
  return den === 1n ? `${num}` : `${num}/${den}`;
}

export function parseRational(text: string): Rational {
  const match = /^(-?\d+)(?:\/(\d+))?$/.exec(text.trim());
  if (match === null) {
    throw new DecoderProcessError(`malformed rational from decoder: ${text}`);
  }
  return normalizeRational([BigInt(match[1]), BigInt(match[2] ?? "1")], "rational");
}

export function validateProblem(problem: ApiProblem): void {
  if (!Number.isInteger(problem.vertexCount) || problem.vertexCount < 0) {
    throw new ValidationError("vertexCount must be a non-negative integer");
  }
  problem.edges.forEach((edge, index) => {
    if (edge.vertices.length === 0) {
      throw new ValidationError(`edge ${index} has an empty vertex set`);
    }
    const seen = new Set<number>();
    for (const v of edge.vertices) {
      if (!Number.isInteger(v) || v < 0 || v >= problem.vertexCount) {
        throw new ValidationError(`edge ${index} vertex ${v} out of range`);
      }
      if (seen.has(v)) {
        throw new ValidationError(`edge ${index} repeats vertex ${v}`);
      }
      seen.add(v);
    }
    const [num, den] = normalizeRational(edge.weight, `edge ${index} weight`);
    if (num < 0n) {
      throw new ValidationError(
        `edge ${index} has negative weight ${num}/${den}; preprocess first`);
    }
  });
}

export function validateSyndrome(problem: ApiProblem, syndrome: number[]): void {
  for (const v of syndrome) {
    if (!Number.isInteger(v) || v < 0 || v >= problem.vertexCount) {
      throw new ValidationError(`syndrome vertex ${v} out of range`);
    }
  }
}

/** The problem-file payload in the decoder's canonical text format. */
export function serializeProblem(problem: ApiProblem, syndrome?: number[]): string {
  validateProblem(problem);
  const payload: Record<string, unknown> = {
    format: "parityfactor-problem",
    version: 1,
    vertex_count: problem.vertexCount,
    edges: problem.edges.map((edge) => ({
      vertices: [...edge.vertices].sort((a, b) => a - b),
      weight: formatRational(normalizeRational(edge.weight, "weight")),
    })),
  };
  if (syndrome !== undefined) {
    validateSyndrome(problem, syndrome);
    payload.syndrome = [...syndrome].sort((a, b) => a - b);
  }
  return JSON.stringify(payload) + "\n";
}

interface CliRun {
  status: number;
  stdout: string;
  stderr: string;
}

function runCli(args: string[]): CliRun {
  try {
    const stdout = execFileSync(PYTHON, ["-m", "parityfactor", ...args], {
      encoding: "utf8",
      stdio: ["ignore", "pipe", "pipe"],
    });
    return { status: 0, stdout, stderr: "" };
  } catch (error) {
    const failure = error as {
      status?: number | null;
      stdout?: string;
      stderr?: string;
      message?: string;
    };
    if (failure.status === undefined || failure.status === null) {
      throw new DecoderProcessError(
        `failed to launch decoder CLI: ${failure.message ?? error}`);
    }
    return {
      status: failure.status,
      stdout: failure.stdout ?? "",
      stderr: failure.stderr ?? "",
    };
  }
}

function raiseForFailure(run: CliRun): never {
  const message = run.stderr.trim() || `decoder exited with status ${run.status}`;
  if (run.stderr.includes("error[infeasible]")) {
    throw new InfeasibleSyndromeError(message);
  }
  if (run.stderr.includes("error[overflow]")) {
    throw new OverflowSignalError(message);
  }
  if (run.status === 3) {
    throw new ValidationError(message);
  }
  throw new DecoderProcessError(message);
}

function withTempDir<T>(body: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "parityfactor-"));
  try {
    return body(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function decodeArgs(options: DecodeOptions): string[] {
  const args: string[] = [];
  args.push("--c", options.c === undefined ? "inf" : String(options.c));
  if (options.finders !== undefined) {
    args.push("--finders", options.finders.join(","));
  }
  return args;
}

/** Decode one syndrome; numerically identical to the CLI on the same input. */
export function apiDecode(
  problem: ApiProblem,
  syndrome: number[],
  options: DecodeOptions = {},
): DecodeResult {
  const text = serializeProblem(problem, syndrome);
  return withTempDir((dir) => {
    const problemPath = join(dir, "problem.json");
    const certPath = join(dir, "certificate.json");
    writeFileSync(problemPath, text);
    const run = runCli([
      "decode", problemPath, "--out", certPath, ...decodeArgs(options),
    ]);
    if (run.status !== 0) {
      raiseForFailure(run);
    }
    const certificate = JSON.parse(readFileSync(certPath, "utf8"));
    return {
      pattern: certificate.pattern as number[],
      primal: parseRational(certificate.primal_weight),
      dual: parseRational(certificate.dual_objective),
      gap: parseRational(certificate.gap),
      certified: certificate.certified as boolean,
    };
  });
}

/** Brute-force minimum-weight parity factor through the CLI oracle. */
export function apiOracle(
  problem: ApiProblem,
  syndrome: number[],
  cap?: number,
): OracleResult {
  const text = serializeProblem(problem, syndrome);
  return withTempDir((dir) => {
    const problemPath = join(dir, "problem.json");
    writeFileSync(problemPath, text);
    const args = ["oracle", problemPath];
    if (cap !== undefined) {
      args.push("--cap", String(cap));
    }
    const run = runCli(args);
    if (run.status !== 0) {
      raiseForFailure(run);
    }
    const payload = JSON.parse(run.stdout);
    return {
      pattern: payload.pattern as number[],
      weight: parseRational(payload.weight),
    };
  });
}

/** Re-check a certificate (as produced by apiDecode or the CLI). */
export function apiVerify(
  problem: ApiProblem,
  syndrome: number[],
  certificateJson: string,
): VerifyReport {
  const text = serializeProblem(problem, syndrome);
  return withTempDir((dir) => {
    const problemPath = join(dir, "problem.json");
    const certPath = join(dir, "certificate.json");
    writeFileSync(problemPath, text);
    writeFileSync(certPath, certificateJson);
    const run = runCli(["verify", problemPath, certPath]);
    if (run.status === 0) {
      return { ok: true, failures: [] };
    }
    if (run.status === 5) {
      const failures = run.stdout
        .split("\n")
        .filter((line) => line.startsWith("FAIL: "))
        .map((line) => line.slice("FAIL: ".length));
      return { ok: false, failures };
    }
    raiseForFailure(run);
  });
}
