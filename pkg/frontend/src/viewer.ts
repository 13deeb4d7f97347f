import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";
import type { Annotation, Geometry, SliceResult, Vec3 } from "./types";

/** Three.js scene wrapper: model, cut plane, loop overlay, markers. */
export class Viewer {
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  readonly renderer: THREE.WebGLRenderer;
  readonly controls: OrbitControls;

  private meshObject: THREE.Mesh | null = null;
  private planeObject: THREE.Mesh | null = null;
  private overlay = new THREE.Group();
  private markers = new THREE.Group();
  private raycaster = new THREE.Raycaster();

  constructor(private readonly container: HTMLElement) {
    const w = container.clientWidth || 800;
    const h = container.clientHeight || 600;
    this.camera = new THREE.PerspectiveCamera(50, w / h, 0.01, 1000);
    this.camera.position.set(3, 2, 4);
    this.renderer = new THREE.WebGLRenderer({ antialias: true });
    this.renderer.setSize(w, h);
    container.appendChild(this.renderer.domElement);

    this.controls = new OrbitControls(this.camera, this.renderer.domElement);
    this.controls.enableDamping = true;

    this.scene.background = new THREE.Color(0x10141a);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.45));
    const key = new THREE.DirectionalLight(0xffffff, 1.1);
    key.position.set(4, 6, 5);
    this.scene.add(key);
    this.scene.add(this.overlay);
    this.scene.add(this.markers);

    const animate = () => {
      requestAnimationFrame(animate);
      this.controls.update();
      this.renderer.render(this.scene, this.camera);
    };
    animate();

    window.addEventListener("resize", () => {
      const cw = this.container.clientWidth || 800;
      const ch = this.container.clientHeight || 600;
      this.camera.aspect = cw / ch;
      this.camera.updateProjectionMatrix();
      this.renderer.setSize(cw, ch);
    });
  }

  setModel(geometry: Geometry, bboxMin: Vec3, bboxMax: Vec3): void {
    if (this.meshObject) this.scene.remove(this.meshObject);
    const geo = new THREE.BufferGeometry();
    geo.setAttribute(
      "position",
      new THREE.BufferAttribute(geometry.positions, 3)
    );
    geo.setIndex(new THREE.BufferAttribute(geometry.indices, 1));
    geo.computeVertexNormals();
    const mat = new THREE.MeshStandardMaterial({
      color: 0xb8826b,
      roughness: 0.65,
      metalness: 0.05,
      side: THREE.DoubleSide,
    });
    this.meshObject = new THREE.Mesh(geo, mat);
    this.scene.add(this.meshObject);

    const center = new THREE.Vector3(
      (bboxMin[0] + bboxMax[0]) / 2,
      (bboxMin[1] + bboxMax[1]) / 2,
      (bboxMin[2] + bboxMax[2]) / 2
    );
    const diag = new THREE.Vector3(
      bboxMax[0] - bboxMin[0],
      bboxMax[1] - bboxMin[1],
      bboxMax[2] - bboxMin[2]
    ).length();
    this.controls.target.copy(center);
    this.camera.position
      .copy(center)
      .add(new THREE.Vector3(0.9, 0.6, 1.1).multiplyScalar(diag));
    this.camera.near = diag / 1000;
    this.camera.far = diag * 50;
    this.camera.updateProjectionMatrix();
  }

  setCutPlane(normal: Vec3, offset: number, size: number): void {
    if (this.planeObject) this.scene.remove(this.planeObject);
    const mat = new THREE.MeshBasicMaterial({
      color: 0x4fa3ff,
      transparent: true,
      opacity: 0.15,
      side: THREE.DoubleSide,
      depthWrite: false,
    });
    this.planeObject = new THREE.Mesh(
      new THREE.PlaneGeometry(size, size),
      mat
    );
    const n = new THREE.Vector3(...normal).normalize();
    this.planeObject.quaternion.setFromUnitVectors(
      new THREE.Vector3(0, 0, 1),
      n
    );
    this.planeObject.position.copy(n.multiplyScalar(offset));
    this.scene.add(this.planeObject);
  }

  setSliceOverlay(result: SliceResult): void {
    this.overlay.clear();
    const loopMat = new THREE.LineBasicMaterial({ color: 0xffe14d });
    const chainMat = new THREE.LineBasicMaterial({ color: 0xff5d5d });
    for (const loop of result.loops) {
      const pts = loop.points.map((p) => new THREE.Vector3(...p));
      const geo = new THREE.BufferGeometry().setFromPoints(pts);
      this.overlay.add(new THREE.LineLoop(geo, loopMat));
    }
    for (const chain of result.open_chains) {
      const pts = chain.map((p) => new THREE.Vector3(...p));
      const geo = new THREE.BufferGeometry().setFromPoints(pts);
      this.overlay.add(new THREE.Line(geo, chainMat));
    }
  }

  clearSliceOverlay(): void {
    this.overlay.clear();
  }

  setAnnotations(annotations: Annotation[], markerSize: number): void {
    this.markers.clear();
    for (const a of annotations) {
      const sprite = new THREE.Sprite(
        new THREE.SpriteMaterial({
          map: numberTexture(a.id),
          depthTest: false,
        })
      );
      sprite.position.set(...a.anchor);
      sprite.scale.setScalar(markerSize);
      sprite.userData.annotation = a;
      this.markers.add(sprite);
    }
  }

  setAnnotationsVisible(visible: boolean): void {
    this.markers.visible = visible;
  }

  /** The annotation under a click, if any. */
  pickAnnotation(clientX: number, clientY: number): Annotation | null {
    if (!this.markers.visible) return null;
    const rect = this.renderer.domElement.getBoundingClientRect();
    const ndc = new THREE.Vector2(
      ((clientX - rect.left) / rect.width) * 2 - 1,
      -((clientY - rect.top) / rect.height) * 2 + 1
    );
    this.raycaster.setFromCamera(ndc, this.camera);
    const hits = this.raycaster.intersectObjects(this.markers.children);
    return hits.length
      ? (hits[0].object.userData.annotation as Annotation)
      : null;
  }

  /** Camera look direction, for "slice along current view". */
  viewDirection(): Vec3 {
    const d = new THREE.Vector3();
    this.camera.getWorldDirection(d);
    return [d.x, d.y, d.z];
  }
}

function numberTexture(n: number): THREE.CanvasTexture {
  const canvas = document.createElement("canvas");
  canvas.width = canvas.height = 64;
  const ctx = canvas.getContext("2d")!;
  ctx.fillStyle = "#ffe14d";
  ctx.beginPath();
  ctx.arc(32, 32, 30, 0, Math.PI * 2);
  ctx.fill();
  ctx.fillStyle = "#10141a";
  ctx.font = "bold 34px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.fillText(String(n), 32, 34);
  return new THREE.CanvasTexture(canvas);
}
