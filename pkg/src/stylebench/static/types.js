/** Wire types mirroring the review service's JSON payloads. */
export {};
