// Shapes of the service's JSON display format.

export interface DisplayLink {
  name: string;
  url: string;
  weight: number;
  target: string;
}

export interface DisplayPayload {
  bucket: string;
  title: string;
  metadata: [string, string][];
  links: DisplayLink[];
  session: string;
}

export function parsePayload(raw: unknown): DisplayPayload {
  const data = raw as Record<string, unknown>;
  if (
    typeof data !== "object" ||
    data === null ||
    typeof data.bucket !== "string" ||
    typeof data.title !== "string" ||
    !Array.isArray(data.links)
  ) {
    throw new Error("malformed display payload");
  }
  for (const link of data.links as DisplayLink[]) {
    if (typeof link.url !== "string" || typeof link.target !== "string") {
      throw new Error("malformed link entry");
    }
  }
  return data as unknown as DisplayPayload;
}
