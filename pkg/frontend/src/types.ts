/** Wire types mirroring the service's JSON contracts. */

export interface MediaSummary {
  id: string;
  uri: string;
  duration: number;
}

export interface TypeSummary {
  id: string;
  label: string;
  valueKind: string;
  annotationCount: number;
  vocabulary?: string[];
  numericDomain?: [number, number];
}

export interface PackageSummary {
  id: string;
  media: MediaSummary;
  types: TypeSummary[];
  annotationCount: number;
}

export type BoxColor = string | { start: string; end: string };

export interface LayoutBox {
  annotationId: string;
  lane: number;
  x: number;
  w: number;
  color: BoxColor;
  label: string | null;
}

export interface LayoutBin {
  index: number;
  x: number;
  w: number;
  count: number;
  color: string;
}

export interface LayoutTrack {
  typeId: string;
  mode: "boxes" | "binned";
  lanesUsed: number;
  boxes: LayoutBox[];
  bins: LayoutBin[];
  yTop: number;
  heightPx: number;
}

export interface LayoutTick {
  t: number;
  x: number;
  label: string;
}

export interface LayoutJson {
  viewport: { from: number; to: number; widthPx: number };
  tracks: LayoutTrack[];
  ticks: LayoutTick[];
  totalHeightPx: number;
  gutterPx: number;
}

export interface AnnotationValueJson {
  kind: string;
  text: string;
  number?: number;
  token?: string;
  from?: string;
  to?: string;
}

export interface AnnotationDetail {
  id: string;
  typeId: string;
  typeLabel: string;
  begin: number;
  end: number;
  beginTimecode: string;
  endTimecode: string;
  value: AnnotationValueJson;
}

export interface ServiceError {
  code: string;
  message: string;
  position?: number;
}
